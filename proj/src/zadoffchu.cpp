#include "smn/zadoffchu.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smn/errors.hpp"

namespace smn {

namespace {
constexpr double kPi = 3.141592653589793;
}

ZcSequence zc_generate(int root_u, int length_n) {
    if (length_n < 3 || length_n % 2 == 0)
        throw InvalidLength("zc_generate: length must be odd and >= 3");
    if (root_u <= 0 || root_u >= length_n)
        throw InvalidRoot("zc_generate: root must satisfy 0 < u < N");
    if (std::gcd(root_u, length_n) != 1)
        throw InvalidRoot("zc_generate: root must be coprime with N");

    ZcSequence seq;
    seq.root_u = root_u;
    seq.length_n = length_n;
    seq.samples.reserve(static_cast<std::size_t>(length_n));
    for (int n = 0; n < length_n; ++n) {
        // reduce u*n*(n+1) mod 2N in integers to keep the phase exact
        const long long num = static_cast<long long>(root_u) * n * (n + 1);
        const long long k = num % (2LL * length_n);
        const double phase = -kPi * static_cast<double>(k) / length_n;
        seq.samples.push_back(std::polar(1.0, phase));
    }
    return seq;
}

std::complex<double> cyclic_xcorr(std::span<const std::complex<double>> a,
                                  std::span<const std::complex<double>> b,
                                  int shift) {
    if (a.size() != b.size())
        throw LengthMismatch("cyclic_xcorr: sequence lengths differ");
    const int n = static_cast<int>(a.size());
    if (shift < 0 || shift >= n)
        throw DomainError("cyclic_xcorr: shift must be in [0, N)");
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const int j = (i + shift) % n;
        acc += a[static_cast<std::size_t>(i)] * std::conj(b[static_cast<std::size_t>(j)]);
    }
    return acc;
}

std::complex<double> cyclic_xcorr(const ZcSequence& a, const ZcSequence& b,
                                  int shift) {
    if (a.length_n != b.length_n)
        throw LengthMismatch("cyclic_xcorr: sequence lengths differ");
    return cyclic_xcorr(std::span<const std::complex<double>>(a.samples),
                        std::span<const std::complex<double>>(b.samples), shift);
}

double peak_xcorr_magnitude(std::span<const std::complex<double>> received,
                            const ZcSequence& seq) {
    if (received.size() != seq.samples.size())
        throw LengthMismatch("peak_xcorr: received length differs from codebook");
    double best = 0.0;
    for (int shift = 0; shift < seq.length_n; ++shift) {
        best = std::max(best, std::abs(cyclic_xcorr(
                                  received,
                                  std::span<const std::complex<double>>(seq.samples),
                                  shift)));
    }
    return best;
}

std::vector<std::complex<double>> superpose_probe_acks(
    const std::vector<ZcSequence>& codebook, const std::vector<int>& active,
    double noise_sigma, Rng& noise_rng, const std::vector<double>* amplitudes) {
    if (codebook.empty()) throw EmptyCodebook("superpose: empty codebook");
    const int n = codebook.front().length_n;
    for (const auto& seq : codebook)
        if (seq.length_n != n)
            throw LengthMismatch("superpose: codebook lengths differ");

    std::vector<std::complex<double>> received(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < active.size(); ++k) {
        const int idx = active[k];
        if (idx < 0 || idx >= static_cast<int>(codebook.size()))
            throw DomainError("superpose: active index out of range");
        const double amp = amplitudes ? (*amplitudes)[k] : 1.0;
        const auto& samples = codebook[static_cast<std::size_t>(idx)].samples;
        for (int i = 0; i < n; ++i)
            received[static_cast<std::size_t>(i)] += amp * samples[static_cast<std::size_t>(i)];
    }
    if (noise_sigma > 0.0) {
        for (auto& sample : received) {
            const auto [re, im] = noise_rng.normal_pair();
            sample += std::complex<double>(noise_sigma * re, noise_sigma * im);
        }
    }
    return received;
}

std::set<int> detect_responders(std::span<const std::complex<double>> received,
                                const std::vector<ZcSequence>& codebook,
                                double threshold_fraction) {
    if (codebook.empty()) throw EmptyCodebook("detect_responders: empty codebook");
    if (!(threshold_fraction > 0.0) || !(threshold_fraction < 1.0))
        throw DomainError("detect_responders: threshold must be in (0, 1)");
    const int n = codebook.front().length_n;
    for (const auto& seq : codebook)
        if (seq.length_n != n)
            throw LengthMismatch("detect_responders: codebook lengths differ");
    if (received.size() != static_cast<std::size_t>(n))
        throw LengthMismatch("detect_responders: received length differs");

    const double bar = threshold_fraction * n;
    std::set<int> detected;
    for (std::size_t i = 0; i < codebook.size(); ++i) {
        if (peak_xcorr_magnitude(received, codebook[i]) >= bar)
            detected.insert(static_cast<int>(i));
    }
    return detected;
}

}  // namespace smn
