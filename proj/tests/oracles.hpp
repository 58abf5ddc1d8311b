#pragma once

// Independent reference implementations. Deliberately naive: direct loops,
// no shared helpers with the library under test.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace oracle {

// One-sided |X[k]|^2 by the O(n^2) DFT, long double accumulation. Twiddles
// come from a table indexed by (k*t) mod n so every angle is exact.
inline std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<long double> cs(n), sn(n);
  for (std::size_t m = 0; m < n; ++m) {
    const long double a = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>(m) /
                          static_cast<long double>(n);
    cs[m] = std::cos(a);
    sn[m] = std::sin(a);
  }
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    long double re = 0, im = 0;
    std::size_t idx = 0;
    for (std::size_t t = 0; t < n; ++t) {
      re += x[t] * cs[idx];
      im += x[t] * sn[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    p[k] = static_cast<double>(re * re + im * im);
  }
  return p;
}

inline std::vector<double> dct_ii(const std::vector<double>& x, int n_out) {
  const int n = static_cast<int>(x.size());
  std::vector<double> c(n_out);
  for (int j = 0; j < n_out; ++j) {
    long double s = 0;
    for (int m = 0; m < n; ++m)
      s += x[m] * std::cos(std::numbers::pi_v<long double> * j * (m + 0.5L) / n);
    c[j] = static_cast<double>(s * (j == 0 ? std::sqrt(1.0L / n) : std::sqrt(2.0L / n)));
  }
  return c;
}

// out[t][j][f] = relu(b[f] + sum_k w(k,f) * x(t, j + k - (K-1)/2)), zero outside.
inline std::vector<double> conv_same_relu(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                                          const Eigen::VectorXd& b) {
  const int T = static_cast<int>(x.rows()), n = static_cast<int>(x.cols());
  const int K = static_cast<int>(w.rows()), F = static_cast<int>(w.cols());
  const int pad = (K - 1) / 2;
  std::vector<double> out(static_cast<std::size_t>(T) * n * F);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < n; ++j)
      for (int f = 0; f < F; ++f) {
        double s = b(f);
        for (int k = 0; k < K; ++k) {
          const int src = j + k - pad;
          if (src >= 0 && src < n) s += w(k, f) * x(t, src);
        }
        out[(static_cast<std::size_t>(t) * n + j) * F + f] = s > 0 ? s : 0;
      }
  return out;
}

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Scalar LSTM with gate blocks stacked [i, f, g, o]. x is T x d.
inline std::vector<double> lstm_last_hidden(const Eigen::MatrixXd& x, const Eigen::MatrixXd& W,
                                            const Eigen::MatrixXd& U, const Eigen::VectorXd& b) {
  const int T = static_cast<int>(x.rows()), d = static_cast<int>(x.cols());
  const int u = static_cast<int>(U.cols());
  std::vector<double> h(u, 0.0), c(u, 0.0);
  for (int t = 0; t < T; ++t) {
    std::vector<double> z(4 * u);
    for (int r = 0; r < 4 * u; ++r) {
      double s = b(r);
      for (int k = 0; k < d; ++k) s += W(r, k) * x(t, k);
      for (int k = 0; k < u; ++k) s += U(r, k) * h[k];
      z[r] = s;
    }
    for (int k = 0; k < u; ++k) {
      const double i = sigmoid(z[k]);
      const double f = sigmoid(z[u + k]);
      const double g = std::tanh(z[2 * u + k]);
      const double o = sigmoid(z[3 * u + k]);
      c[k] = f * c[k] + i * g;
      h[k] = o * std::tanh(c[k]);
    }
  }
  return h;
}

struct TinyWeights {
  Eigen::MatrixXd conv_w;
  Eigen::VectorXd conv_b;
  Eigen::MatrixXd lstm_w, lstm_u;
  Eigen::VectorXd lstm_b;
  Eigen::VectorXd dense_w;
  double dense_b = 0.0;
};

// conv -> relu -> flatten [t][j][f] -> lstm -> dense logit.
inline double forward_logit(const Eigen::MatrixXd& x, const TinyWeights& p) {
  const int T = static_cast<int>(x.rows()), n = static_cast<int>(x.cols());
  const int F = static_cast<int>(p.conv_w.cols());
  const std::vector<double> conv = conv_same_relu(x, p.conv_w, p.conv_b);
  Eigen::MatrixXd flat(T, n * F);
  for (int t = 0; t < T; ++t)
    for (int j = 0; j < n; ++j)
      for (int f = 0; f < F; ++f) flat(t, j * F + f) = conv[(static_cast<std::size_t>(t) * n + j) * F + f];
  const std::vector<double> h = lstm_last_hidden(flat, p.lstm_w, p.lstm_u, p.lstm_b);
  double z = p.dense_b;
  for (std::size_t k = 0; k < h.size(); ++k) z += p.dense_w(static_cast<Eigen::Index>(k)) * h[k];
  return z;
}

inline double bce_from_logit(double z, int y) {
  // -[y ln s(z) + (1-y) ln(1-s(z))] = softplus(z) - y z
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - y * z;
}

struct Counts {
  long tp = 0, fp = 0, tn = 0, fn = 0;
};

// Counts via indicator products rather than branching on the pair.
inline Counts count(const std::vector<int>& pred, const std::vector<int>& label) {
  Counts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    c.tp += pred[i] * label[i];
    c.fp += pred[i] * (1 - label[i]);
    c.tn += (1 - pred[i]) * (1 - label[i]);
    c.fn += (1 - pred[i]) * label[i];
  }
  return c;
}

inline int dominant_bin(const std::vector<double>& power) {
  int best = 1;
  for (int k = 1; k < static_cast<int>(power.size()); ++k)
    if (power[k] > power[best]) best = k;
  return best;
}

}  // namespace oracle
