#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace confair {

struct InvalidInstance : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct PreconditionViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Search ran out of nodes or wall time. Callers treat this as an explicit
// failure, never as an approximate answer.
struct BudgetExceeded : std::runtime_error {
    BudgetExceeded() : std::runtime_error("search budget exceeded") {}
};

// No feasible complete allocation exists (chi(G) > n).
struct InfeasibleInstance : std::runtime_error {
    InfeasibleInstance() : std::runtime_error("no feasible allocation exists") {}
};

struct NoEf1Allocation : std::runtime_error {
    NoEf1Allocation() : std::runtime_error("no EF1 allocation exists") {}
};

// Some component is K_{Delta+1}, or an odd cycle when Delta = 2.
struct NotDeltaColorable : std::runtime_error {
    std::vector<std::vector<int>> offending_components;
    explicit NotDeltaColorable(std::vector<std::vector<int>> offenders)
        : std::runtime_error("graph has no Delta-coloring"),
          offending_components(std::move(offenders)) {}
};

struct NotBipartite : std::runtime_error {
    std::vector<int> odd_cycle;
    explicit NotBipartite(std::vector<int> cycle)
        : std::runtime_error("graph is not bipartite"), odd_cycle(std::move(cycle)) {}
};

}  // namespace confair
