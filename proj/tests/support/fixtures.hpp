#pragma once

#include <string>

namespace fixtures {

// Three news queries feeding a shared downstream node; the first query
// carries its own parenthetical, so the tool label must be taken from the
// last one on the line.
inline const std::string kMarketPlanText =
    "Nodes:\n"
    "A: Price fluctuation of coke (Quasi-first-grade Metallurgical Coke) in early October 2024 (News)\n"
    "B: Impact of global energy market on coke prices (News)\n"
    "C: International coke market dynamics in early October 2024 (News)\n"
    "Edges: A -> C; B -> C";

inline const std::string kMarketQuery =
    "In early October 2024, among coal products, what is the price increase of coke "
    "(quasi-first-grade metallurgical coke)?";

// Scripted two-phase completion replaying a full trajectory around the
// plan above.
inline std::string market_phase1_completion() {
  return "<think>The question asks for a specific price change in a narrow time window, which "
         "needs fresh news coverage from several angles.</think>\n<search>\n" +
         kMarketPlanText + "\n</search>";
}

inline std::string market_phase2_completion() {
  return "<answer>Based on the search results the increase was 11.1%. The answer is: C</answer>";
}

}  // namespace fixtures
