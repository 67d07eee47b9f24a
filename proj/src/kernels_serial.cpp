#include <cmath>
#include <vector>

#include "steer/kernels.hpp"

namespace steer::kernels::serial {

void matmul(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
            c[i * n + j] = acc;
        }
    }
}

void matmul_nt(const double* a, const double* b, const double* bias, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            double acc = bias ? bias[j] : 0.0;
            for (int p = 0; p < k; ++p) acc += a[i * k + p] * b[j * k + p];
            c[i * n + j] = acc;
        }
    }
}

void layer_norm_rows(double* x, int rows, int dim, const double* gain, const double* bias, double eps) {
    for (int r = 0; r < rows; ++r) {
        double* row = x + static_cast<std::size_t>(r) * dim;
        double mean = 0.0;
        for (int i = 0; i < dim; ++i) mean += row[i];
        mean /= dim;
        double var = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double d = row[i] - mean;
            var += d * d;
        }
        var /= dim;
        const double inv = 1.0 / std::sqrt(var + eps);
        for (int i = 0; i < dim; ++i) row[i] = (row[i] - mean) * inv * gain[i] + bias[i];
    }
}

void softmax_rows(double* x, int rows, int cols, const int* valid) {
    for (int r = 0; r < rows; ++r) {
        double* row = x + static_cast<std::size_t>(r) * cols;
        const int v = valid ? valid[r] : cols;
        double mx = row[0];
        for (int i = 1; i < v; ++i) mx = row[i] > mx ? row[i] : mx;
        double sum = 0.0;
        for (int i = 0; i < v; ++i) {
            row[i] = std::exp(row[i] - mx);
            sum += row[i];
        }
        for (int i = 0; i < v; ++i) row[i] /= sum;
        for (int i = v; i < cols; ++i) row[i] = 0.0;
    }
}

void causal_attention(const double* q, const double* k, const double* v, double* out, int t, int dh,
                      double scale) {
    for (int i = 0; i < t; ++i) {
        // scores over positions j <= i, softmaxed in place
        std::vector<double> s(static_cast<std::size_t>(i) + 1);
        double mx = -1e300;
        for (int j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (int p = 0; p < dh; ++p) acc += q[i * dh + p] * k[j * dh + p];
            s[j] = acc * scale;
            if (s[j] > mx) mx = s[j];
        }
        double sum = 0.0;
        for (int j = 0; j <= i; ++j) {
            s[j] = std::exp(s[j] - mx);
            sum += s[j];
        }
        for (int p = 0; p < dh; ++p) {
            double acc = 0.0;
            for (int j = 0; j <= i; ++j) acc += s[j] * v[j * dh + p];
            out[i * dh + p] = acc / sum;
        }
    }
}

void tanh_inplace(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::tanh(x[i]);
}

void add_inplace(double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] += y[i];
}

}  // namespace steer::kernels::serial
