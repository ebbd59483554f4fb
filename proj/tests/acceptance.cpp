// Acceptance run: one PASS/FAIL line per criterion, with its time limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "fakelens/verify.hpp"

using namespace fakelens;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool report(int id, const CheckResult& r, double elapsed, double limit, const std::string& note = {}) {
  const bool ok = r.passed && r.checks > 0 && elapsed < limit;
  std::printf("%s %d %-16s %8llu checks %4llu skipped %8.2f s (limit %.0f s)", ok ? "PASS" : "FAIL", id,
              r.name.c_str(), static_cast<unsigned long long>(r.checks), static_cast<unsigned long long>(r.skipped),
              elapsed, limit);
  if (!r.passed) std::printf("  first failure: %s", r.detail.c_str());
  if (r.passed && elapsed >= limit) std::printf("  over time");
  if (!note.empty()) std::printf("  %s", note.c_str());
  std::printf("\n");
  std::fflush(stdout);
  return ok;
}

bool timed(int id, double limit, const std::function<CheckResult()>& run) {
  const auto start = Clock::now();
  CheckResult r;
  try {
    r = run();
  } catch (const std::exception& e) {
    r.name = "criterion-" + std::to_string(id);
    r.expect(false, [&] { return std::string("exception: ") + e.what(); });
  }
  return report(id, r, seconds_since(start), limit);
}

}  // namespace

int main() {
  const VerifyOptions opt;
  bool all = true;
  all &= timed(1, 1, check_worked_examples);
  all &= timed(2, 5, check_p_identities);
  all &= timed(3, 30, check_q_ladder);
  all &= timed(4, 60, check_r_table);
  all &= timed(5, 600, [&] { return check_a_equals_b(opt); });
  all &= timed(6, 300, [&] { return check_kernel(opt); });
  all &= timed(7, 120, [&] { return check_properties(opt); });

  // Criterion 8 is limited per (d, K) case.
  CheckResult r8{"structure-set"};
  double worst = 0, total = 0;
  const auto start8 = Clock::now();
  for (unsigned d = 5; d <= 9; ++d)
    for (int level = 1; level <= 6; ++level) {
      const auto start = Clock::now();
      try {
        check_structure_set_case(d, level, opt, r8);
      } catch (const std::exception& e) {
        r8.expect(false, [&] { return std::string("exception: ") + e.what(); });
      }
      worst = std::max(worst, seconds_since(start));
    }
  total = seconds_since(start8);
  char note[64];
  std::snprintf(note, sizeof note, "slowest case %.3f s, total %.2f s", worst, total);
  all &= report(8, r8, worst, 1, note);

  std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all ? 0 : 1;
}
