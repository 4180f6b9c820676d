// Minimal end-to-end example: generate a small-world network, run the
// scripted consensus agents over the message-passing protocol, and print the
// transcript together with the evaluation.

#include <iostream>

#include "agentmesh/generators.hpp"
#include "agentmesh/names.hpp"
#include "agentmesh/protocol.hpp"
#include "agentmesh/scripted_agents.hpp"

int main() {
  using namespace agentmesh;

  Topology topo = gen_small_world(8, 4, 0.3, /*seed=*/7);
  auto identities = assign_names(topo, default_name_pool(), /*seed=*/7);
  apply_labels(topo, identities);

  const TaskKind task = TaskKind::Consensus;
  const int rounds = compute_round_budget(task, topo, RoundMode::Benchmark);

  auto backend = make_scripted_agent(task, /*seed=*/7);
  std::map<std::string, AgentBackend*> backends;
  for (const auto& id : identities) backends[id.name] = backend.get();

  EngineOptions opts;
  opts.run_id = "demo";
  MessagePassingEngine engine(topo, identities, backends, make_task_spec(task, topo), opts);
  engine.run_rounds(rounds);
  const auto answers = engine.collect_final_answers();

  for (const auto& event : engine.transcript().events) {
    if (event.kind == EventKind::Outgoing || event.kind == EventKind::Final) {
      std::cout << "[round " << event.round << "] " << event.agent << ": " << event.content
                << "\n";
    }
  }

  const Evaluation ev = evaluate(task, topo, answers);
  std::cout << "\nsolved: " << (ev.solved ? "yes" : "no") << ", soft score: " << ev.soft_score
            << "\n";
  return ev.solved ? 0 : 1;
}
