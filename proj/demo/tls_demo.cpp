// Walks through the toy TLS machines: separating sequences, fingerprinting,
// and an incremental run over four implementations.

#include <iostream>

#include "fsmprint/fsmprint.hpp"

using namespace fsmprint;

int main() {
  const auto trio = tls_toy_models();
  const std::vector<MealyMachine> models(trio.begin(), trio.end());
  const Alphabet& in = models[0].inputs();

  std::cout << "separating sequences\n";
  for (std::size_t i = 0; i < models.size(); ++i)
    for (std::size_t j = i + 1; j < models.size(); ++j)
      std::cout << "  M" << i << " / M" << j << ": "
                << to_string(*shortest_separating_sequence(models[i], models[j]), in) << "\n";

  const auto fp = build_fingerprint(models);
  std::cout << "fingerprint:";
  for (const auto& w : fp.sequences) std::cout << " " << to_string(w, in);
  std::cout << "\n";

  for (std::size_t i = 0; i < models.size(); ++i) {
    auto s = make_simulated_sul(models[i]);
    const auto r = adg_identify(s, models, fp);
    std::cout << "  implementation of M" << i << " identified as M" << *r.match << " after "
              << r.order.size() << " sequence(s), " << s.symbols_sent() << " symbols\n";
  }

  // Only M0 and M1 known: hello.hello cannot tell M1 from M2.
  {
    const std::vector<MealyMachine> two{models[0], models[1]};
    auto s = make_simulated_sul(models[2]);
    const auto r = sepseq_identify(s, two, build_fingerprint(two), 0);
    std::cout << "M2 against {M0, M1}: fingerprint says M" << *r.match << "\n";
  }

  PipelineConfig cfg;
  cfg.fcq = CqConfig::perfect();
  cfg.lcq = CqConfig::perfect();
  const std::size_t pattern[] = {0, 1, 2, 1};
  std::vector<Implementation> impls;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto m = models[pattern[i]];
    impls.push_back({"I" + std::to_string(i), [m] { return make_simulated_sul(m); }});
  }
  const auto report = incremental_fingerprinting(impls, {}, cfg);
  std::cout << "incremental run\n";
  for (const auto& r : report.records)
    std::cout << "  " << r.id << ": " << to_string(r.outcome) << " -> model " << *r.model << "\n";
  std::cout << "models learned: " << report.models.size() << ", symbols: " << report.total_symbols()
            << ", equivalence queries: " << report.eq_queries() << "\n";
}
