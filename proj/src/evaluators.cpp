// SPDX-License-Identifier: Apache-2.0
#include "pvqe/evaluators.hpp"

namespace pvqe {

BatchRunner::BatchRunner(DeviceContext ctx, std::uint64_t seed)
    : ctx_(std::move(ctx)), seed_(seed) {
  if (!ctx_.topology) throw BatchError("BatchRunner: no topology");
  if (ctx_.pairs.empty()) throw BatchError("BatchRunner: no pairs selected");
  if (ctx_.confusions)
    for (const QubitPair& p : ctx_.pairs)
      if (!ctx_.confusions->count(p)) throw BatchError("BatchRunner: missing confusion matrix");
}

BatchResult BatchRunner::run(const std::vector<AnsatzParams>& params) {
  if (params.size() > ctx_.pairs.size())
    throw BatchError("BatchRunner: more assignments than pairs");
  BatchJob job;
  job.shots = ctx_.shots;
  job.exact_expectation = ctx_.exact_expectation;
  job.model = ctx_.model;
  job.seed = RngStream(seed_).derive({calls_++}).next_u64();
  for (std::size_t i = 0; i < params.size(); ++i)
    job.assignments.push_back({ctx_.pairs[i], params[i]});
  return run_batch(job, *ctx_.topology, ctx_.options);
}

Evaluation BatchRunner::evaluate(const PairOutcome& outcome, const BatchResult& batch) const {
  Evaluation e;
  e.raw = pair_energy(outcome, batch, ctx_.model);
  if (ctx_.confusions) e.ni = pair_energy(outcome, batch, ctx_.model, &ctx_.confusions->at(outcome.pair));
  return e;
}

PointEvaluator same_params_evaluator(std::shared_ptr<BatchRunner> runner) {
  return [runner](const AnsatzParams& a) {
    const std::vector<AnsatzParams> params(runner->context().pairs.size(), a);
    const BatchResult batch = runner->run(params);
    std::vector<EnergyEstimate> raw, ni;
    for (const PairOutcome& o : batch.pairs) {
      Evaluation e = runner->evaluate(o, batch);
      raw.push_back(e.raw);
      if (e.ni) ni.push_back(*e.ni);
    }
    Evaluation pooled;
    pooled.raw = aggregate_same_params(raw);
    if (!ni.empty()) pooled.ni = aggregate_same_params(ni);
    return pooled;
  };
}

BatchEvaluator batch_evaluator(std::shared_ptr<BatchRunner> runner) {
  return [runner](const std::vector<AnsatzParams>& points) {
    const std::size_t p = runner->context().pairs.size();
    std::vector<Evaluation> out;
    out.reserve(points.size());
    for (std::size_t start = 0; start < points.size(); start += p) {
      const std::size_t end = std::min(points.size(), start + p);
      const std::vector<AnsatzParams> chunk(points.begin() + static_cast<std::ptrdiff_t>(start),
                                            points.begin() + static_cast<std::ptrdiff_t>(end));
      const BatchResult batch = runner->run(chunk);
      for (const PairOutcome& o : batch.pairs) out.push_back(runner->evaluate(o, batch));
    }
    return out;
  };
}

TfloResult tflo_evaluate(const PointEvaluator& evaluate, const AnsatzParams& a,
                         const HubbardParams& h) {
  TfloResult r;
  const AnsatzParams ref{0.0, a.theta};
  r.measured = evaluate(a);
  r.reference = evaluate(ref);
  r.reference_exact = exact_energy(ref, h);
  r.raw = r.measured.raw.value;
  r.ni = r.measured.best().value;
  r.tflo = tflo_correct(r.raw, r.reference_exact, r.reference.raw.value);
  r.tflo_ni = tflo_correct(r.ni, r.reference_exact, r.reference.best().value);
  return r;
}

}  // namespace pvqe
