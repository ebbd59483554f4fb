#pragma once

#include <stdexcept>
#include <string>

namespace fakelens {

/// Two operands live in quotient rings of different level.
class LevelMismatch : public std::invalid_argument {
 public:
  LevelMismatch(int lhs, int rhs)
      : std::invalid_argument("level mismatch: " + std::to_string(lhs) + " vs " +
                              std::to_string(rhs)) {}
};

/// The element has no inverse in Q[chi]/I<K>.
class NotInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation that must be exact (a division, an integrality claim, a
/// uniqueness claim) turned out not to be. Always indicates a bug or a
/// contradiction with a proven statement; never a user error.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// An enumeration would visit more points than the configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(unsigned long long needed, unsigned long long budget)
      : std::runtime_error("enumeration needs " + std::to_string(needed) +
                           " points, budget is " + std::to_string(budget)),
        needed_(needed),
        budget_(budget) {}

  unsigned long long needed() const { return needed_; }
  unsigned long long budget() const { return budget_; }

 private:
  unsigned long long needed_;
  unsigned long long budget_;
};

/// Text that does not follow one of the serialization grammars.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace fakelens
