#pragma once

#include <complex>
#include <set>
#include <span>
#include <vector>

#include "smn/rng.hpp"

namespace smn {

// Zadoff-Chu sequence: constant amplitude, perfect periodic autocorrelation,
// cross-correlation magnitude sqrt(N) between distinct roots of prime length.
struct ZcSequence {
    int root_u = 0;
    int length_n = 0;
    std::vector<std::complex<double>> samples;
};

// samples[n] = exp(-i pi u n (n+1) / N), n = 0..N-1.  N must be odd and >= 3;
// the root must satisfy 0 < u < N and gcd(u, N) = 1.
ZcSequence zc_generate(int root_u, int length_n);

// sum_n a[n] * conj(b[(n+shift) mod N])
std::complex<double> cyclic_xcorr(std::span<const std::complex<double>> a,
                                  std::span<const std::complex<double>> b,
                                  int shift);
std::complex<double> cyclic_xcorr(const ZcSequence& a, const ZcSequence& b,
                                  int shift);

// max over all cyclic shifts of |cyclic_xcorr(received, seq, shift)|
double peak_xcorr_magnitude(std::span<const std::complex<double>> received,
                            const ZcSequence& seq);

// Sample-wise sum of the active codebook entries (unit amplitude unless
// overridden) plus circular complex Gaussian noise of per-sample std
// noise_sigma.  Models the shared probe-ACK slot.
std::vector<std::complex<double>> superpose_probe_acks(
    const std::vector<ZcSequence>& codebook, const std::vector<int>& active,
    double noise_sigma, Rng& noise_rng,
    const std::vector<double>* amplitudes = nullptr);

// Index i is reported iff peak_xcorr_magnitude(received, codebook[i]) >=
// threshold_fraction * N.
std::set<int> detect_responders(std::span<const std::complex<double>> received,
                                const std::vector<ZcSequence>& codebook,
                                double threshold_fraction);

}  // namespace smn
