// print the addressing plan for the reference chain: per-site transition
// frequencies and the frequency-budget audit for the default pulse plan

#include <iostream>

#include "stmqc/stmqc.hpp"

int main() {
  using namespace stmqc;
  const ChainConfig chain = reference_config(3);
  const FrequencyTable table = build_frequency_table(chain);
  write_frequency_table_csv(std::cout, table);
  std::cout << "\n";
  const ConstraintReport report = check_budget(chain, default_pulse_plan(chain), 0.1);
  std::cout << render_constraint_report_text(report);
  return report.exit_status() == 1 ? 1 : 0;
}
