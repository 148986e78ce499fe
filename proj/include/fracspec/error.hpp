#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracspec {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error { using Error::Error; };
struct CapacityError : Error { using Error::Error; };
struct ContractError : Error { using Error::Error; };
struct DegenerateNetworkError : Error { using Error::Error; };
struct MultiplierError : Error { using Error::Error; };
struct BranchError : Error { using Error::Error; };
struct SystemDefinitionError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct OverflowError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };

// Carries the bound that was actually reached.
struct AccuracyError : Error {
    AccuracyError(const std::string& what, double achieved)
        : Error(what), achieved(achieved) {}
    double achieved;
};

// Step budget ran out; `completed` samples finished before it did.
struct BudgetError : Error {
    BudgetError(const std::string& what, std::size_t completed, double partial_mean)
        : Error(what), completed(completed), partial_mean(partial_mean) {}
    std::size_t completed;
    double partial_mean;
};

}  // namespace fracspec
