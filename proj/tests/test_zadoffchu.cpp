#include <cmath>
#include <complex>

#include "doctest.h"
#include "smn/errors.hpp"
#include "smn/rng.hpp"
#include "smn/zadoffchu.hpp"

using namespace smn;

namespace {

bool coprime(int a, int b) {
    while (b) {
        const int t = a % b;
        a = b;
        b = t;
    }
    return a == 1;
}

const int kPrimes[] = {7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43,
                       47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101};

}  // namespace

TEST_SUITE_BEGIN("zadoffchu");

TEST_CASE("generation closed form") {
    const auto seq = zc_generate(1, 3);
    REQUIRE(seq.samples.size() == 3);
    CHECK(std::abs(seq.samples[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(seq.samples[1] - std::polar(1.0, -2.0 * 3.141592653589793 / 3.0)) < 1e-12);
    CHECK(std::abs(seq.samples[2] - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("generation rejects bad parameters") {
    CHECK_THROWS_AS(zc_generate(3, 3), InvalidRoot);   // u == N
    CHECK_THROWS_AS(zc_generate(0, 7), InvalidRoot);
    CHECK_THROWS_AS(zc_generate(-2, 7), InvalidRoot);
    CHECK_THROWS_AS(zc_generate(3, 9), InvalidRoot);   // gcd = 3
    CHECK_THROWS_AS(zc_generate(1, 8), InvalidLength); // even
    CHECK_THROWS_AS(zc_generate(1, 1), InvalidLength); // too short
}

TEST_CASE("unit modulus everywhere") {
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        const int n = 3 + 2 * static_cast<int>(rng.uniform_below(50));  // odd <= 101
        int u = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        while (!coprime(u, n))
            u = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        const auto seq = zc_generate(u, n);
        for (const auto& s : seq.samples) CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
    }
}

TEST_CASE("perfect periodic autocorrelation") {
    const auto seq7 = zc_generate(1, 7);
    CHECK(std::abs(cyclic_xcorr(seq7, seq7, 0) - std::complex<double>(7.0, 0.0)) < 1e-9);
    for (int shift = 1; shift < 7; ++shift)
        CHECK(std::abs(cyclic_xcorr(seq7, seq7, shift)) < 1e-9);

    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
        const int n = 3 + 2 * static_cast<int>(rng.uniform_below(50));
        int u = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        while (!coprime(u, n))
            u = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        const auto seq = zc_generate(u, n);
        CHECK(std::abs(cyclic_xcorr(seq, seq, 0)) == doctest::Approx(n).epsilon(1e-12));
        for (int shift = 1; shift < n; ++shift)
            CHECK(std::abs(cyclic_xcorr(seq, seq, shift)) < 1e-9);
    }
}

TEST_CASE("prime-length cross-correlation is flat at sqrt(N)") {
    const auto a = zc_generate(1, 7);
    const auto b = zc_generate(2, 7);
    for (int shift = 0; shift < 7; ++shift)
        CHECK(std::abs(std::abs(cyclic_xcorr(a, b, shift)) - std::sqrt(7.0)) < 1e-9);

    Rng rng(23);
    for (int k = 0; k < 20; ++k) {
        const int n = kPrimes[rng.uniform_below(std::size(kPrimes))];
        const int u1 = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        int u2 = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        while (u2 == u1)
            u2 = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 1)));
        const auto s1 = zc_generate(u1, n);
        const auto s2 = zc_generate(u2, n);
        for (int shift = 0; shift < n; ++shift)
            CHECK(std::abs(std::abs(cyclic_xcorr(s1, s2, shift)) - std::sqrt(n)) < 1e-9);
    }
}

TEST_CASE("xcorr argument validation") {
    const auto a = zc_generate(1, 7);
    const auto b = zc_generate(1, 11);
    CHECK_THROWS_AS(cyclic_xcorr(a, b, 0), LengthMismatch);
    CHECK_THROWS_AS(cyclic_xcorr(a, a, 7), DomainError);
    CHECK_THROWS_AS(cyclic_xcorr(a, a, -1), DomainError);
}

TEST_CASE("detection: empty signal, single responder, full superposition") {
    const int n = 11;
    std::vector<ZcSequence> codebook;
    for (int u = 1; u < n; ++u) codebook.push_back(zc_generate(u, n));

    // all-zero signal detects nothing
    std::vector<std::complex<double>> silent(n, 0.0);
    CHECK(detect_responders(silent, codebook, 0.5).empty());

    // every single responder is detected exactly, noiseless
    Rng noise(1);
    for (int i = 0; i < n - 1; ++i) {
        const auto received = superpose_probe_acks(codebook, {i}, 0.0, noise);
        const auto detected = detect_responders(received, codebook, 0.5);
        REQUIRE(detected.size() == 1);
        CHECK(*detected.begin() == i);
    }

    // all ten roots transmitting concurrently: every one detected
    std::vector<int> everyone;
    for (int i = 0; i < n - 1; ++i) everyone.push_back(i);
    const auto received = superpose_probe_acks(codebook, everyone, 0.0, noise);
    const auto detected = detect_responders(received, codebook, 0.5);
    CHECK(detected == std::set<int>(everyone.begin(), everyone.end()));
}

TEST_CASE("detection validation") {
    const auto a = zc_generate(1, 7);
    std::vector<std::complex<double>> sig(7, 0.0);
    CHECK_THROWS_AS(detect_responders(sig, {}, 0.5), EmptyCodebook);
    CHECK_THROWS_AS(detect_responders(sig, {a}, 0.0), DomainError);
    CHECK_THROWS_AS(detect_responders(sig, {a}, 1.0), DomainError);
    std::vector<std::complex<double>> wrong(9, 0.0);
    CHECK_THROWS_AS(detect_responders(wrong, {a}, 0.5), LengthMismatch);
}

TEST_SUITE_END();
