#pragma once
// Error taxonomy. Each exception carries the CLI exit code it maps to:
//   2 = usage / precondition violation, 3 = budget exhaustion,
//   1 = statistical failure the caller asked us to detect (cluster mismatch).
#include <stdexcept>
#include <string>

namespace specmix {

class Error : public std::runtime_error {
public:
    Error(std::string msg, int exit_code)
        : std::runtime_error(std::move(msg)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }
private:
    int exit_code_;
};

// A stated hypothesis of the routine does not hold for the given arguments.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& msg) : Error(msg, 2) {}
};

// Derived sample / candidate count exceeds the configured cap.
class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(const std::string& msg) : Error(msg, 3) {}
};

// Clustering produced a number of clusters different from the requested k.
class ClusterCountMismatch : public Error {
public:
    ClusterCountMismatch(std::size_t got, std::size_t want)
        : Error("clustering produced " + std::to_string(got) +
                " clusters, expected " + std::to_string(want), 1),
          got_(got) {}
    std::size_t count() const noexcept { return got_; }
private:
    std::size_t got_;
};

// The moment-matching sphere search ran out of restarts before reaching
// tolerance (the zero exists; the local search is heuristic).
class SearchExhausted : public Error {
public:
    explicit SearchExhausted(const std::string& msg) : Error(msg, 1) {}
};

}  // namespace specmix
