#include "kernels.hpp"

#include <algorithm>

namespace pm25::nn::kernels {

namespace {

// 64-byte vectors via GCC/Clang vector extensions; on targets without
// 512-bit registers the compiler splits them.
template <typename T>
struct Vec;
template <>
struct Vec<float> {
  typedef float type __attribute__((vector_size(64), aligned(4), may_alias));
};
template <>
struct Vec<double> {
  typedef double type __attribute__((vector_size(64), aligned(8), may_alias));
};
template <typename T>
using vec_t = typename Vec<T>::type;

template <typename T>
constexpr int kVecLanes = static_cast<int>(64 / sizeof(T));

template <typename T>
inline vec_t<T> load(const T* p) {
  return *reinterpret_cast<const vec_t<T>*>(p);
}

template <typename T>
inline void store(T* p, vec_t<T> v) {
  *reinterpret_cast<vec_t<T>*>(p) = v;
}

constexpr int kRows = 8;   // output pixels per forward tile
constexpr int kDepth = 8;  // reduction rows per weight-gradient tile
constexpr int kVecs = 2;   // vectors of output channels per tile

// All paths accumulate acc = acc + a * b in increasing reduction order; the
// scalar tail uses the same expression so every element rounds identically.

template <typename T>
void forward_full(std::size_t K, std::size_t N, const T* a, const std::size_t* poff, const std::size_t* koff,
                  const T* b, const T* bias, T* c) {
  using V = vec_t<T>;
  constexpr int L = kVecLanes<T>;
  V acc[kRows][kVecs] = {};
  const T* ap[kRows];
  for (int r = 0; r < kRows; ++r) ap[r] = a + poff[r];
  for (std::size_t k = 0; k < K; ++k) {
    const T* brow = b + k * N;
    V bv[kVecs];
#pragma GCC unroll 4
    for (int v = 0; v < kVecs; ++v) bv[v] = load<T>(brow + v * L);
    const std::size_t ko = koff[k];
#pragma GCC unroll 8
    for (int r = 0; r < kRows; ++r) {
      const T av = ap[r][ko];
#pragma GCC unroll 4
      for (int v = 0; v < kVecs; ++v) acc[r][v] = acc[r][v] + av * bv[v];
    }
  }
  for (int r = 0; r < kRows; ++r) {
    for (int v = 0; v < kVecs; ++v) {
      V out = acc[r][v];
      if (bias) out = out + load<T>(bias + v * L);
      store<T>(c + static_cast<std::size_t>(r) * N + v * L, out);
    }
  }
}

template <typename T>
void forward_tail(int rows, int lanes, std::size_t K, std::size_t N, const T* a, const std::size_t* poff,
                  const std::size_t* koff, const T* b, const T* bias, T* c) {
  constexpr int NB = kVecs * kVecLanes<T>;
  T acc[kRows][NB] = {};
  for (std::size_t k = 0; k < K; ++k) {
    const T* brow = b + k * N;
    for (int r = 0; r < rows; ++r) {
      const T av = a[poff[r] + koff[k]];
      for (int n = 0; n < lanes; ++n) acc[r][n] = acc[r][n] + av * brow[n];
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int n = 0; n < lanes; ++n) {
      c[static_cast<std::size_t>(r) * N + n] = bias ? acc[r][n] + bias[n] : acc[r][n];
    }
  }
}

template <typename T>
void weight_full(std::size_t P, std::size_t N, const T* a, const std::size_t* poff, const std::size_t* koff,
                 const T* d, T* c) {
  using V = vec_t<T>;
  constexpr int L = kVecLanes<T>;
  V acc[kDepth][kVecs] = {};
  std::size_t ko[kDepth];
  for (int j = 0; j < kDepth; ++j) ko[j] = koff[j];
  for (std::size_t p = 0; p < P; ++p) {
    const T* ap = a + poff[p];
    const T* drow = d + p * N;
    V dv[kVecs];
#pragma GCC unroll 4
    for (int v = 0; v < kVecs; ++v) dv[v] = load<T>(drow + v * L);
#pragma GCC unroll 8
    for (int j = 0; j < kDepth; ++j) {
      const T av = ap[ko[j]];
#pragma GCC unroll 4
      for (int v = 0; v < kVecs; ++v) acc[j][v] = acc[j][v] + av * dv[v];
    }
  }
  for (int j = 0; j < kDepth; ++j) {
    for (int v = 0; v < kVecs; ++v) {
      T* dst = c + static_cast<std::size_t>(j) * N + v * L;
      store<T>(dst, load<T>(dst) + acc[j][v]);
    }
  }
}

template <typename T>
void weight_tail(int depth, int lanes, std::size_t P, std::size_t N, const T* a, const std::size_t* poff,
                 const std::size_t* koff, const T* d, T* c) {
  constexpr int NB = kVecs * kVecLanes<T>;
  T acc[kDepth][NB] = {};
  for (std::size_t p = 0; p < P; ++p) {
    const T* ap = a + poff[p];
    const T* drow = d + p * N;
    for (int j = 0; j < depth; ++j) {
      const T av = ap[koff[j]];
      for (int n = 0; n < lanes; ++n) acc[j][n] = acc[j][n] + av * drow[n];
    }
  }
  for (int j = 0; j < depth; ++j) {
    for (int n = 0; n < lanes; ++n) c[static_cast<std::size_t>(j) * N + n] += acc[j][n];
  }
}

}  // namespace

template <typename T>
void gather_gemm(std::size_t P, std::size_t K, std::size_t N, const T* a, const std::size_t* poff,
                 const std::size_t* koff, const T* b, const T* bias, T* c) {
  constexpr std::size_t NB = kVecs * kVecLanes<T>;
  for (std::size_t n0 = 0; n0 < N; n0 += NB) {
    const std::size_t lanes = std::min(NB, N - n0);
    const T* bb = bias ? bias + n0 : nullptr;
    for (std::size_t p0 = 0; p0 < P; p0 += kRows) {
      const std::size_t rows = std::min<std::size_t>(kRows, P - p0);
      T* ctile = c + p0 * N + n0;
      if (rows == kRows && lanes == NB) {
        forward_full<T>(K, N, a, poff + p0, koff, b + n0, bb, ctile);
      } else {
        forward_tail<T>(static_cast<int>(rows), static_cast<int>(lanes), K, N, a, poff + p0, koff, b + n0, bb,
                        ctile);
      }
    }
  }
}

template <typename T>
void gather_gemm_at(std::size_t P, std::size_t K, std::size_t N, const T* a, const std::size_t* poff,
                    const std::size_t* koff, const T* d, T* c) {
  constexpr std::size_t NB = kVecs * kVecLanes<T>;
  for (std::size_t k0 = 0; k0 < K; k0 += kDepth) {
    const std::size_t depth = std::min<std::size_t>(kDepth, K - k0);
    for (std::size_t n0 = 0; n0 < N; n0 += NB) {
      const std::size_t lanes = std::min(NB, N - n0);
      T* ctile = c + k0 * N + n0;
      if (depth == kDepth && lanes == NB) {
        weight_full<T>(P, N, a, poff, koff + k0, d + n0, ctile);
      } else {
        weight_tail<T>(static_cast<int>(depth), static_cast<int>(lanes), P, N, a, poff, koff + k0, d + n0, ctile);
      }
    }
  }
}

template void gather_gemm<float>(std::size_t, std::size_t, std::size_t, const float*, const std::size_t*,
                                 const std::size_t*, const float*, const float*, float*);
template void gather_gemm<double>(std::size_t, std::size_t, std::size_t, const double*, const std::size_t*,
                                  const std::size_t*, const double*, const double*, double*);
template void gather_gemm_at<float>(std::size_t, std::size_t, std::size_t, const float*, const std::size_t*,
                                    const std::size_t*, const float*, float*);
template void gather_gemm_at<double>(std::size_t, std::size_t, std::size_t, const double*, const std::size_t*,
                                     const std::size_t*, const double*, double*);

}  // namespace pm25::nn::kernels
