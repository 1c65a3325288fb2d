#pragma once

#include <cstdint>
#include <vector>

#include "dmdecoh/types.hpp"

namespace dmdecoh {

/// Morning/evening counts in the bright (+) and dark (-) ports.
template <class T>
struct BinValues
{
    T mrnPlus{};
    T mrnMinus{};
    T evePlus{};
    T eveMinus{};

    T total() const { return mrnPlus + mrnMinus + evePlus + eveMinus; }
};

using BinCounts = BinValues<std::int64_t>;
using BinMeans = BinValues<double>;

enum class Channel
{
    decoherence,
    phase_shift //!< null-aligned interferometer; the visibility role is played by Im gamma_other
};

struct RunPlan
{
    Experiment experiment;
    double runLength = defaults::runLength_s; //!< [s]
    double etaDM = defaults::etaDM;
    double etaRes = defaults::etaRes;
    Channel channel = Channel::decoherence;

    void validate() const;
    /// B0 = T_run Gamma.
    double expected_events() const { return runLength * experiment.countRate; }
};

/// B_mrn = (B0 + dB/2)/4 [1 +- g (1 + s/2)], B_eve = (B0 - dB/2)/4 [1 +- g (1 - s/2)].
BinMeans expected_bins(double sTilde, double gammaVis, double B0, double deltaB = 0.0);

/// 2 (B+m B-e - B-m B+e) / (B+m B+e - B-m B-e).
double estimate_sidereal(const BinMeans& bins);
double estimate_sidereal(const BinCounts& counts);

struct EstimatorSpread
{
    double full = 0.0;       //!< delta-method standard deviation
    double asymptotic = 0.0; //!< 2 sqrt((g^-2 - 1) / B0)
    bool asymptoticValid = true;
};

EstimatorSpread estimator_stddev(double B0, double gammaVis, double sTilde = 0.0,
                                 double deltaB = 0.0);

struct Threshold
{
    double sigma = 0.0;      //!< statistical term
    double background = 0.0; //!< etaRes ln(1/gamma_vis)
    double threshold = 0.0;
    double chi = 0.0;        //!< 1 / threshold
};

/// threshold = sigma + etaRes ln(1/gamma_vis), with sigma at s -> 0, dB = 0.
Threshold detection_threshold(const RunPlan& plan);

/// Four independent Poisson draws from expected_bins.
BinCounts simulate_run(double sTilde, double gammaVis, double B0, double deltaB,
                       std::uint64_t seed);

struct ReplicaSummary
{
    std::int64_t replicas = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double coverage = 0.0; //!< fraction with |estimate - true| < 1.96 sigma_full
    std::int64_t degenerate = 0;
};

/// Replica ensemble; replica i uses derive_seed(seed, i), so results do not depend on threads.
ReplicaSummary simulate_replicas(double sTilde, double gammaVis, double B0, double deltaB,
                                 std::int64_t replicas, std::uint64_t seed, int threads = 1,
                                 std::vector<BinCounts>* counts = nullptr);

/// Amplitude of the fundamental sidereal harmonic of a uniformly sampled periodic series.
double fundamental_amplitude(const std::vector<double>& values);

/// Peak time of the fundamental harmonic, in cycles in [0, 1).
double fundamental_phase(const std::vector<double>& values);

} // namespace dmdecoh
