#pragma once

#include <cstddef>

// Register-blocked products used by Conv2D and Dense.
//
// The left operand is addressed indirectly: element (p, k) lives at
// a[poff[p] + koff[k]]. For a 3x3 convolution in NHWC layout poff[p] is the
// top-left corner of output pixel p's receptive field and koff[k] walks the
// (ky, kx, c) window, so no im2col buffer is materialised.
//
// Every output element is reduced in increasing k (or p) order regardless of
// which tile it falls in, so results do not depend on the batch composition.
namespace pm25::nn::kernels {

// c[p*N + n] = (bias ? bias[n] : 0) + sum_k A(p,k) * b[k*N + n]
template <typename T>
void gather_gemm(std::size_t P, std::size_t K, std::size_t N, const T* a, const std::size_t* poff,
                 const std::size_t* koff, const T* b, const T* bias, T* c);

// c[k*N + n] += sum_p A(p,k) * d[p*N + n]
template <typename T>
void gather_gemm_at(std::size_t P, std::size_t K, std::size_t N, const T* a, const std::size_t* poff,
                    const std::size_t* koff, const T* d, T* c);

extern template void gather_gemm<float>(std::size_t, std::size_t, std::size_t, const float*, const std::size_t*,
                                        const std::size_t*, const float*, const float*, float*);
extern template void gather_gemm<double>(std::size_t, std::size_t, std::size_t, const double*, const std::size_t*,
                                         const std::size_t*, const double*, const double*, double*);
extern template void gather_gemm_at<float>(std::size_t, std::size_t, std::size_t, const float*,
                                           const std::size_t*, const std::size_t*, const float*, float*);
extern template void gather_gemm_at<double>(std::size_t, std::size_t, std::size_t, const double*,
                                            const std::size_t*, const std::size_t*, const double*, double*);

}  // namespace pm25::nn::kernels
