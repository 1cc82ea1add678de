#include "zeroinv/riccati_bessel.hpp"

#include <cmath>

#include "zeroinv/errors.hpp"

namespace zeroinv {

std::vector<double> riccati_j(int lmax, double x) {
  if (lmax < 0 || !(x > 0.0)) throw InputError("riccati_j: need lmax >= 0 and x > 0");
  std::vector<double> out(static_cast<std::size_t>(lmax) + 1);
  const double s = std::sin(x), c = std::cos(x);
  out[0] = s;
  if (lmax == 0) return out;

  if (x > static_cast<double>(lmax)) {
    out[1] = s / x - c;
    for (int l = 1; l < lmax; ++l)
      out[static_cast<std::size_t>(l) + 1] =
          (2.0 * l + 1.0) / x * out[static_cast<std::size_t>(l)] -
          out[static_cast<std::size_t>(l) - 1];
    return out;
  }

  // Miller: start well above lmax with arbitrary seeds and recur downward,
  // rescaling to keep the iterates finite, then normalize against jhat_0 or jhat_1.
  const int start = lmax + 20 + static_cast<int>(std::sqrt(40.0 * (lmax + 1)));
  double up = 0.0, cur = 1e-300;
  double scale_log = 0.0;
  std::vector<double> logs(out.size(), 0.0);
  for (int l = start; l > 0; --l) {
    const double down = (2.0 * l + 1.0) / x * cur - up;
    up = cur;
    cur = down;
    if (std::abs(cur) > 1e250) {
      up /= 1e250;
      cur /= 1e250;
      scale_log += std::log(1e250);
    }
    if (l - 1 <= lmax) {
      out[static_cast<std::size_t>(l) - 1] = cur;
      logs[static_cast<std::size_t>(l) - 1] = scale_log;
    }
  }
  // out[l] * exp(logs[l]) is proportional to jhat_l with a common factor;
  // bring every entry to the scale of out[0].
  const double ref_log = logs[0];
  for (std::size_t l = 0; l < out.size(); ++l) out[l] *= std::exp(logs[l] - ref_log);
  const double j1 = s / x - c;
  const double norm = std::abs(s) > std::abs(j1) ? s / out[0] : j1 / out[1];
  for (double& v : out) v *= norm;
  return out;
}

std::vector<double> riccati_n(int lmax, double x) {
  if (lmax < 0 || !(x > 0.0)) throw InputError("riccati_n: need lmax >= 0 and x > 0");
  std::vector<double> out(static_cast<std::size_t>(lmax) + 1);
  const double s = std::sin(x), c = std::cos(x);
  out[0] = -c;
  if (lmax == 0) return out;
  out[1] = -c / x - s;
  for (int l = 1; l < lmax; ++l)
    out[static_cast<std::size_t>(l) + 1] =
        (2.0 * l + 1.0) / x * out[static_cast<std::size_t>(l)] -
        out[static_cast<std::size_t>(l) - 1];
  return out;
}

RiccatiBessel riccati_bessel(int lmax, double x) {
  RiccatiBessel rb;
  rb.j = riccati_j(lmax + 1, x);
  rb.n = riccati_n(lmax + 1, x);
  rb.dj.resize(static_cast<std::size_t>(lmax) + 1);
  rb.dn.resize(static_cast<std::size_t>(lmax) + 1);
  // f_l' = f_{l-1} - l/x f_l, equivalently (l+1)/x f_l - f_{l+1}
  for (int l = 0; l <= lmax; ++l) {
    const auto i = static_cast<std::size_t>(l);
    rb.dj[i] = (l + 1.0) / x * rb.j[i] - rb.j[i + 1];
    rb.dn[i] = (l + 1.0) / x * rb.n[i] - rb.n[i + 1];
  }
  rb.j.pop_back();
  rb.n.pop_back();
  return rb;
}

}  // namespace zeroinv
