#pragma once

#include <cstddef>

// Dense kernels behind the toy transformer. Every kernel has a serial
// reference and an OpenMP variant; the two are bit-identical because the
// parallel versions only split independent output elements across threads
// and keep each element's summation order fixed.

namespace steer::kernels {

enum class ExecMode { serial, parallel };

// c[m x n] = a[m x k] * b[k x n], row-major.
void matmul(ExecMode mode, const double* a, const double* b, double* c, int m, int k, int n);

// c[m x n] = a[m x k] * b^T (b is [n x k], row-major), plus optional bias[n].
void matmul_nt(ExecMode mode, const double* a, const double* b, const double* bias, double* c,
               int m, int k, int n);

// In-place row-wise layer norm with learned gain/bias.
void layer_norm_rows(ExecMode mode, double* x, int rows, int dim, const double* gain,
                     const double* bias, double eps);

// In-place row-wise softmax over the leading `valid` entries of each row
// (entries at or beyond `valid` are ignored); used with valid = row index + 1
// for causal attention. valid == nullptr means full rows.
void softmax_rows(ExecMode mode, double* x, int rows, int cols, const int* valid);

// Single-head causal self attention. q, k, v are [t x dh]; out is [t x dh].
void causal_attention(ExecMode mode, const double* q, const double* k, const double* v,
                      double* out, int t, int dh, double scale);

void tanh_inplace(ExecMode mode, double* x, std::size_t n);

void add_inplace(ExecMode mode, double* x, const double* y, std::size_t n);

}  // namespace steer::kernels

namespace steer::kernels::serial {
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, const double* bias, double* c, int m, int k, int n);
void layer_norm_rows(double* x, int rows, int dim, const double* gain, const double* bias, double eps);
void softmax_rows(double* x, int rows, int cols, const int* valid);
void causal_attention(const double* q, const double* k, const double* v, double* out, int t, int dh,
                      double scale);
void tanh_inplace(double* x, std::size_t n);
void add_inplace(double* x, const double* y, std::size_t n);
}  // namespace steer::kernels::serial

namespace steer::kernels::parallel {
void matmul(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, const double* bias, double* c, int m, int k, int n);
void layer_norm_rows(double* x, int rows, int dim, const double* gain, const double* bias, double eps);
void softmax_rows(double* x, int rows, int cols, const int* valid);
void causal_attention(const double* q, const double* k, const double* v, double* out, int t, int dh,
                      double scale);
void tanh_inplace(double* x, std::size_t n);
void add_inplace(double* x, const double* y, std::size_t n);
}  // namespace steer::kernels::parallel
