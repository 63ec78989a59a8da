#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace zmoments {

using real = long double;
using cplx = std::complex<real>;

inline constexpr real pi = std::numbers::pi_v<real>;
inline constexpr real two_pi = 2 * std::numbers::pi_v<real>;
inline constexpr real euler_gamma = std::numbers::egamma_v<real>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when a brute-force oracle would exceed its work budget.
struct BudgetError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct PrecisionError : Error {
    using Error::Error;
};

struct CertificationError : Error {
    using Error::Error;
};

struct QuadratureError : Error {
    using Error::Error;
};

// Neumaier variant of Kahan summation.
class Compensated {
public:
    void add(real x) {
        real t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    Compensated& operator+=(real x) {
        add(x);
        return *this;
    }
    real value() const { return sum_ + c_; }

private:
    real sum_ = 0;
    real c_ = 0;
};

class CompensatedC {
public:
    void add(cplx z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    CompensatedC& operator+=(cplx z) {
        add(z);
        return *this;
    }
    cplx value() const { return {re_.value(), im_.value()}; }

private:
    Compensated re_, im_;
};

// e(x) = exp(2 pi i x), reducing x mod 1 first.
inline cplx e_of(real x) {
    real f = x - std::floor(x);
    return std::polar<real>(1, two_pi * f);
}

// Runs f(i) for i in [0, n) over contiguous chunks on std::jthread workers.
// The first exception thrown by any worker is rethrown on the caller.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                std::size_t lo = n * w / threads, hi = n * (w + 1) / threads;
                try {
                    for (std::size_t i = lo; i < hi; ++i) f(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!err) err = std::current_exception();
                }
            });
    }
    if (err) std::rethrow_exception(err);
}

}  // namespace zmoments
