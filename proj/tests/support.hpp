#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "adiabat/eos.hpp"
#include "adiabat/error.hpp"
#include "adiabat/registry.hpp"

namespace support {

inline const std::vector<adiabat::EosSpec>& bundled() {
  static const std::vector<adiabat::EosSpec> specs = adiabat::bundled_registry();
  return specs;
}

inline const adiabat::EosSpec& bundled(const std::string& id) {
  for (const auto& s : bundled()) {
    if (s.id == id) return s;
  }
  throw adiabat::InputError("no bundled space " + id);
}

inline std::filesystem::path data_dir() { return ADIABAT_DATA_DIR; }

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(g() >> 11) * 0x1.0p-53);
}

inline double log_uniform(std::mt19937_64& g, double lo, double hi) {
  return std::exp(uniform(g, std::log(lo), std::log(hi)));
}

inline double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Closed-form per-unit entropies (R = 1 unless given), up to constants.
inline double ideal_entropy(double u, double v, double c = 1.5, double r = 1.0) {
  return c * r * std::log(u) + r * std::log(v);
}

inline double vdw_entropy(double u, double v, double a = 0.1, double b = 0.05, double c = 1.5,
                          double r = 1.0) {
  return c * r * std::log(u + a / v) + r * std::log(v - b);
}

/// Reduced ideal gas with c = 1.5, R = 1 on the given rectangle.
inline adiabat::EosSpec ideal_spec(const std::string& id, double t_lo, double t_hi, double v_lo,
                                   double v_hi, double t_ref, double v_ref, double s_ref = 0) {
  adiabat::EosSpec s;
  s.id = id;
  s.energy = adiabat::parse("c*R*theta");
  s.pressure = adiabat::parse("R*theta/v");
  s.constants = {{"R", 1.0}, {"c", 1.5}};
  s.domain = {t_lo, t_hi, v_lo, v_hi};
  s.theta_ref = t_ref;
  s.v_ref = v_ref;
  s.reference_entropy = s_ref;
  return s;
}

/// Adaptive Simpson quadrature, independent of the library's integrator.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int depth) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
        const double flm = f(lm), frm = f(rm);
        const double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
        const double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
        if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol) {
          return left + right + (left + right - whole) / 15;
        }
        return rec(lo, mid, flo, flm, fmid, left, depth - 1) + rec(mid, hi, fmid, frm, fhi, right, depth - 1);
      };
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 40);
}

/// Entropy change along the isochore at v0 from theta0 to theta1, then the
/// isotherm at theta1 from v0 to v1, using T = theta.
inline double rectangle_delta_s(const adiabat::SimpleSystem& sys, double theta0, double v0, double theta1, double v1) {
  const double h = 1e-6;
  auto u_theta = [&](double t, double v) { return (sys.u_raw(t + h * t, v) - sys.u_raw(t - h * t, v)) / (2 * h * t); };
  auto u_v = [&](double t, double v) { return (sys.u_raw(t, v + h * v) - sys.u_raw(t, v - h * v)) / (2 * h * v); };
  const double along_isochore = simpson([&](double t) { return u_theta(t, v0) / t; }, theta0, theta1, 1e-13);
  // Log substitution keeps the isotherm integrand smooth over decades of v.
  const double along_isotherm = simpson(
      [&](double lv) {
        const double v = std::exp(lv);
        return (u_v(theta1, v) + sys.p_raw(theta1, v)) / theta1 * v;
      },
      std::log(v0), std::log(v1), 1e-13);
  return along_isochore + along_isotherm;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("adiabat_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace support
