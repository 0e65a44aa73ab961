#ifndef TORUSNS_FFT_HPP
#define TORUSNS_FFT_HPP

#include <complex>
#include <map>
#include <vector>

#include <fftw3.h>

#include "torusns/grid.hpp"

namespace torusns {

/// Cached FFTW c2c plans per lattice shape. Plans are created with
/// FFTW_ESTIMATE so results do not depend on planner timing.
class FftEngine {
public:
    static FftEngine& instance() {
        static FftEngine eng;
        return eng;
    }

    /// In-place forward transform, normalized by 1/N so that the k=0
    /// coefficient of a constant field c equals c.
    void forward(const Grid& g, std::vector<std::complex<double>>& data) {
        execute(g, data, FFTW_FORWARD);
        const double inv = 1.0 / static_cast<double>(g.size());
        for (auto& z : data) z *= inv;
    }

    /// In-place inverse transform (unnormalized inverse of forward).
    void inverse(const Grid& g, std::vector<std::complex<double>>& data) {
        execute(g, data, FFTW_BACKWARD);
    }

private:
    FftEngine() = default;
    ~FftEngine() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }
    FftEngine(const FftEngine&) = delete;
    FftEngine& operator=(const FftEngine&) = delete;

    void execute(const Grid& g, std::vector<std::complex<double>>& data, int sign) {
        auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
        fftw_plan plan = get_plan(g, sign);
        fftw_execute_dft(plan, ptr, ptr);
    }

    fftw_plan get_plan(const Grid& g, int sign) {
        std::vector<int> key = g.res();
        key.push_back(sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        // Plan on a scratch buffer; FFTW_ESTIMATE does not touch the data but
        // fftw_plan_dft requires a valid aligned array.
        std::vector<std::complex<double>> scratch(g.size());
        auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = fftw_plan_dft(g.dim(), g.res().data(), ptr, ptr, sign, FFTW_ESTIMATE);
        plans_.emplace(std::move(key), plan);
        return plan;
    }

    std::map<std::vector<int>, fftw_plan> plans_;
};

} // namespace torusns

#endif
