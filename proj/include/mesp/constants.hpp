#pragma once

// Central numeric tolerances. Every module reads from here; the algorithms
// themselves carry no inline magic numbers.
namespace mesp::tol {

// symmetric eigendecomposition (cyclic Jacobi)
inline constexpr double kJacobiOffdiag   = 1e-12;  // off-diagonal Frobenius vs ||M||_F
inline constexpr int    kJacobiMaxSweeps = 100;

// positive definiteness / rank
inline constexpr double kPdRel         = 1e-12;  // lambda_min vs lambda_1 for ldet/solve
inline constexpr double kPsdClipRel    = 1e-8;   // PSD repair window on instance load
inline constexpr double kRankRel       = 1e-9;   // numerical rank threshold
inline constexpr double kInvertibleRel = 1e-9;   // complementation guard
inline constexpr double kSolveResidual = 1e-8;   // linear solve residual contract

// combinatorial search
inline constexpr double    kTie         = 1e-9;   // co-optimum tie tolerance
inline constexpr double    kSwapImprove = 1e-10;  // local-search improvement threshold
inline constexpr long long kEnumBudget  = 2'000'000;
inline constexpr int       kMaxSwapRounds = 100'000;

// polytope / LP
inline constexpr double kFeas    = 1e-9;
inline constexpr double kLpPivot = 1e-9;

// conditional gradient
inline constexpr double kFwTol          = 1e-6;
inline constexpr int    kFwMaxIter      = 2000;
inline constexpr double kFwInnerScaling = 1e-8;  // tightened tol during scaling runs

// scaling optimization
inline constexpr double kNewtonDeriv   = 1e-10;
inline constexpr int    kNewtonMaxIter = 100;
inline constexpr int    kBfgsFixSteps  = 10;  // budget inside fixing loops
inline constexpr int    kBfgsStandalone = 50; // budget for standalone bound reports

// variable fixing
inline constexpr double kFixMargin = 1e-9;
inline constexpr double kProbeGap  = 1e-6;

// factorization bound domain guard: lambda_s vs lambda_1
inline constexpr double kGammaDomainRel = 1e-12;

}  // namespace mesp::tol
