#pragma once
// Private kernel declarations shared between the dispatch unit and the
// per-variant translation units. The scalar bodies live in a TU compiled
// with -ffp-contract=off so their arithmetic is pinned to mul+add.

#include <cstddef>
#include <cstdint>

#include "mbg/kernels.hpp"

namespace mbg::kernels::detail {

// scalar reference entry points (kernels_scalar.cpp)
void sgemm_acc_ref(float*, const float*, const float*, std::size_t,
                   std::size_t, std::size_t);
void sgemm_acc2_ref(float*, float*, const float*, const float*, const float*,
                    std::size_t, std::size_t, std::size_t);
void sgemm_at_acc_ref(float*, const float*, const float*, std::size_t,
                      std::size_t, std::size_t, std::size_t);
void sgemm_bt_acc_ref(float*, const float*, const float*, std::size_t,
                      std::size_t, std::size_t);
void sgemm_bt2_acc_ref(float*, float*, const float*, const float*,
                       const float*, std::size_t, std::size_t, std::size_t);
void sgemm_xt_acc_ref(float*, const float*, const float*, std::size_t,
                      std::size_t, std::size_t, std::size_t);
void sgemm_xt_in_acc_ref(float*, const float*, const float*, std::size_t,
                         std::size_t, std::size_t, std::size_t);
void sger_rows_acc_ref(float*, const float*, const float*, std::size_t,
                       std::size_t, std::size_t);
void smatvec_t_acc_ref(float*, const float*, const float*, std::size_t,
                       std::size_t);
float sdot_ref(const float*, const float*, std::size_t);
void saxpy_ref(float*, float, const float*, std::size_t);
void sgated_act_ref(float*, float*, float*, const float*, const float*,
                    std::size_t);
void svexp_ref(float*, const float*, std::size_t);
double snll_grad_ref(const float*, const std::int32_t*, std::size_t,
                     std::size_t, std::size_t, float, float*);

void dgemm_acc_ref(double*, const double*, const double*, std::size_t,
                   std::size_t, std::size_t);
void dgemm_acc2_ref(double*, double*, const double*, const double*,
                    const double*, std::size_t, std::size_t, std::size_t);
void dgemm_at_acc_ref(double*, const double*, const double*, std::size_t,
                      std::size_t, std::size_t, std::size_t);
void dgemm_bt_acc_ref(double*, const double*, const double*, std::size_t,
                      std::size_t, std::size_t);
void dgemm_bt2_acc_ref(double*, double*, const double*, const double*,
                       const double*, std::size_t, std::size_t, std::size_t);
void dgemm_xt_acc_ref(double*, const double*, const double*, std::size_t,
                      std::size_t, std::size_t, std::size_t);
void dgemm_xt_in_acc_ref(double*, const double*, const double*, std::size_t,
                         std::size_t, std::size_t, std::size_t);
void dger_rows_acc_ref(double*, const double*, const double*, std::size_t,
                       std::size_t, std::size_t);
void dmatvec_t_acc_ref(double*, const double*, const double*, std::size_t,
                       std::size_t);
double ddot_ref(const double*, const double*, std::size_t);
void daxpy_ref(double*, double, const double*, std::size_t);
void dgated_act_ref(double*, double*, double*, const double*, const double*,
                    std::size_t);
void dvexp_ref(double*, const double*, std::size_t);
double dnll_grad_ref(const double*, const std::int32_t*, std::size_t,
                     std::size_t, std::size_t, double, double*);

extern const Table<float> kScalarF;
extern const Table<double> kScalarD;

// AVX2+FMA variant (kernels_avx2.cpp). Valid to call only when
// avx2_available() reports true.
extern const Table<float> kAvx2F;
extern const Table<double> kAvx2D;

}  // namespace mbg::kernels::detail
