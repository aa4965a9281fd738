#pragma once

// Feasibility SDP in equality form: find symmetric PSD blocks X_b with
//   sum_b <A_{r,b}, X_b> = rhs_r  for every row r.
//
// Unknowns are the upper-triangle entries of the blocks, indexed row-major
// per block ((i,j), i <= j); a coefficient on unknown (i,j), i < j, acts on
// the shared value X_ij = X_ji.

#include "pistab/rational.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace pistab {

struct PsdBlockSpec {
    std::string name;
    int dim = 0;

    int tri_size() const { return dim * (dim + 1) / 2; }
};

struct SdpTriplet {
    int row;
    int var;  // global unknown id
    double value;
};

struct SDPProblem {
    std::vector<PsdBlockSpec> blocks;
    std::vector<SdpTriplet> triplets;  // sorted by (row, var)
    std::vector<double> rhs;
    std::vector<std::string> row_labels;  // block/entry/monomial provenance

    int num_rows() const { return static_cast<int>(rhs.size()); }
    int num_vars() const {
        int n = 0;
        for (const auto& b : blocks) n += b.tri_size();
        return n;
    }
    int var_base(int block_index) const {
        int n = 0;
        for (int b = 0; b < block_index; ++b) n += blocks[b].tri_size();
        return n;
    }
    // upper-triangle index within a block
    static int tri_index(int dim, int i, int j) {
        if (i > j) std::swap(i, j);
        return i * dim - i * (i - 1) / 2 + (j - i);
    }
};

// Sparse text dump (SDPA-like): header, block sizes, right-hand side, then
// one "row block i j value" triplet per line. Byte-deterministic for a given
// problem.
void dump_sdp(const SDPProblem& p, std::ostream& os);
void dump_sdp_file(const SDPProblem& p, const std::string& path);

// Conic solver contract.
struct ConeSolveResult {
    enum class Status { Feasible, Infeasible, MaxIters, Failed };
    Status status = Status::Failed;
    std::vector<std::vector<double>> blocks;  // dense row-major PSD blocks when feasible
    double eq_residual = 0.0;
    double cone_gap = 0.0;
    int iterations = 0;
    std::string detail;
};

class ConeSolver {
  public:
    virtual ~ConeSolver() = default;
    virtual ConeSolveResult solve(const SDPProblem& problem) = 0;
};

struct AdmmOptions {
    int max_iterations = 150000;
    double eq_tolerance = 1e-8;
    double gap_tolerance = 1e-8;
    double over_relaxation = 1.7;
    int check_every = 25;
    double farkas_tolerance = 1e-9;
    double time_budget_seconds = 0.0;  // 0 = unlimited
};

class AdmmSolver : public ConeSolver {
  public:
    explicit AdmmSolver(AdmmOptions opts = {}) : opts_(opts) {}
    ConeSolveResult solve(const SDPProblem& problem) override;

  private:
    AdmmOptions opts_;
};

}  // namespace pistab
