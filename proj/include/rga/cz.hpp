#pragma once

#include "rga/norms.hpp"
#include "rga/operator.hpp"

namespace rga {

struct WhitneyCube {
    int level = 0;                 // root box is level 0
    double side = 0;
    Vec low;                       // low corner
    Vec center;
    std::vector<int> points;       // flat grid indices inside [low, low+side)
    double dist_to_complement = 0; // min point-set distance to the complement
};

struct WhitneyResult {
    std::vector<WhitneyCube> cubes;
    std::vector<int> slivers; // set points not covered at the resolution floor
    bool whole_grid = false;  // complement empty: full cover at the root
};

// Dyadic Whitney cover of {i : in_set[i]} anchored at the box corner. Cubes are
// emitted when entirely inside the set with dist(Q, complement) >= diam(Q)
// (geometric diameter side*sqrt(N), point-set distance). Subdivision halts at
// the grid resolution; set points never absorbed become slivers.
WhitneyResult whitney_cover(const Grid& g, const std::vector<char>& in_set);

struct CZPiece {
    WhitneyCube cube;
    double mean = 0;   // quadrature mean of f over the cube (same on each orbit copy)
    GridFunction b;    // orbit-averaged bad part supported on the orbit of the cube
};

struct CZOutput {
    double lambda = 0;
    GridFunction maximal;          // symmetrized Hardy-Littlewood maximal function
    std::vector<char> in_E;        // {Mf > lambda}
    std::vector<char> in_orbit_dilate; // within orbit distance 4*sqrt(N)*side of some cube center
    GridFunction good;
    std::vector<CZPiece> bad;
    int sliver_count = 0;
};

// Group-invariant Calderon-Zygmund decomposition of f at height lambda.
// Throws LambdaTooSmall when {Mf > lambda} is the whole grid and NotInvariant
// when f is not G-invariant within 1e-9.
CZOutput cz_decompose(const GridFunction& f, double lambda);

// Checks the decomposition identities: reconstruction, good-part bound off the
// exceptional set, bad-part cancellation and support, invariance of all parts,
// Whitney geometry recomputed from scratch, and the measure/L1 bookkeeping
// constants.
VerificationReport verify_cz(const CZOutput& out, const GridFunction& f,
                             double measure_const_ceiling = 64.0,
                             double l1_const_ceiling = 16.0);

// Weak (1,1) ratio table lambda * |{|Af| > lambda}| / ||f||_1 over a corpus and
// lambda grid. The identity operator must stay at ratio <= 1; a kernel operator
// must stay below ratio_ceiling with no systematic growth as lambda increases.
VerificationReport weak11_experiment(const std::vector<GridFunction>& corpus,
                                     const OperatorMatrix* op,
                                     const std::vector<double>& lambdas,
                                     double ratio_ceiling = 8.0);

} // namespace rga
