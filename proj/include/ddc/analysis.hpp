#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "ddc/data.hpp"
#include "ddc/types.hpp"

namespace ddc::analysis {

enum class Property { SysId, Controllability, Stabilizability, Stability };

struct HautusCandidate {
    std::complex<double> lambda;
    int rank = 0;
    bool passed = false;
};

struct AnalysisVerdict {
    Property property = Property::SysId;
    bool informative = false;

    // Certificate payloads (property-specific).
    std::optional<SystemModel> identified;   // SysId: (A_s,B_s); Stability: A_s
    Matrix V1, V2;                           // SysId right-inverse blocks
    std::vector<HautusCandidate> candidates; // data-driven Hautus candidates
    std::optional<SpectrumReport> closed_spectrum;  // Stability: sigma(X+ X-^dag)

    // Counterexample consistent with the data and lacking the property,
    // when informative=false and one was found.
    std::optional<SystemModel> witness;
};

// rank [X_-; U_-] = n+m, with identification A_s = X_+ V1, B_s = X_+ V2.
AnalysisVerdict informative_sysid(const BlockMatrices& bm,
                                  const Tolerances& tol = {});

// Data-driven Hautus test: rank(X_+ - lambda X_-) = n for all lambda,
// checked at the finitely many candidates 1/lambda in sigma(X_- X_+^dag).
AnalysisVerdict informative_controllability(const BlockMatrices& bm,
                                            const Tolerances& tol = {});

// Same test restricted to |lambda| >= 1, candidates from
// (lambda-1)^{-1} in sigma(X_-(X_+ - X_-)^dag).
AnalysisVerdict informative_stabilizability(const BlockMatrices& bm,
                                            const Tolerances& tol = {});

// Autonomous data only (U_minus must have zero rows): X_- full row rank and
// X_+ X_-^dag stable.
AnalysisVerdict informative_stability(const BlockMatrices& bm,
                                      const Tolerances& tol = {});

// rank [A - lambda I; Q] = n.
bool hautus_observable(const Matrix& Q, const Matrix& A,
                       const std::complex<double>& lambda,
                       const Tolerances& tol = {});

}  // namespace ddc::analysis
