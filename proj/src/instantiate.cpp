#include "msat/instantiate.hpp"

#include <algorithm>

#include "msat/rng.hpp"

namespace msat {

namespace {

// Keeps value_max^2 inside int64 so the sampling loop can stay on plain
// integers; acceptance checks are re-done with exact rationals in tests.
constexpr std::int64_t kMaxValueCap = 3'000'000'000;

std::vector<double> effective_weights(const GenConfig& config) {
  if (!config.operator_count_weights.empty()) {
    return config.operator_count_weights;
  }
  return std::vector<double>(static_cast<std::size_t>(config.max_operators),
                             1.0);
}

}  // namespace

void GenConfig::validate() const {
  if (max_operators < 1 || max_operators > 8) {
    throw std::invalid_argument("GenConfig: max_operators must be in [1, 8]");
  }
  if (value_min < 0) {
    throw std::invalid_argument("GenConfig: value_min must be non-negative");
  }
  if (value_min > value_max) {
    throw std::invalid_argument("GenConfig: value_min exceeds value_max");
  }
  if (value_max > kMaxValueCap) {
    throw std::invalid_argument("GenConfig: value_max exceeds 3e9");
  }
  if (max_rejections <= 0) {
    throw std::invalid_argument("GenConfig: max_rejections must be positive");
  }
  if (!operator_count_weights.empty()) {
    if (operator_count_weights.size() !=
        static_cast<std::size_t>(max_operators)) {
      throw std::invalid_argument(
          "GenConfig: operator_count_weights must have max_operators entries");
    }
    double sum = 0.0;
    for (double w : operator_count_weights) {
      if (w < 0.0) {
        throw std::invalid_argument(
            "GenConfig: operator_count_weights must be non-negative");
      }
      sum += w;
    }
    if (sum <= 0.0) {
      throw std::invalid_argument(
          "GenConfig: operator_count_weights must have a positive sum");
    }
  }
}

SamplingFailure::SamplingFailure(int template_id, int attempts)
    : std::runtime_error("sampling failed for template " +
                         std::to_string(template_id) + " after " +
                         std::to_string(attempts) + " attempts"),
      template_id_(template_id) {}

const Rational& Instance::value_of(Symbol s) const {
  auto it = values.find(s);
  if (it == values.end()) {
    throw std::out_of_range(std::string("Instance: no value for symbol ") +
                            s.name());
  }
  return it->second;
}

namespace {

// Draws the right-hand leaf for one chain node so that the node value stays
// a non-negative integer <= value_max. Multiplication and division nodes
// additionally keep both operands nonzero; a zero there would make the
// equation unsolvable for some question variables (inverting A*B=C for A
// divides by B). The draw is uniform over the feasible sub-range (for
// division: uniform over the in-range divisors). Returns nullopt on a dead
// end, e.g. a zero accumulator feeding a multiplication.
std::optional<std::int64_t> draw_operand(rng::Rng& rng, Op op,
                                         std::int64_t acc,
                                         const GenConfig& config) {
  const std::int64_t lo = config.value_min;
  const std::int64_t hi = config.value_max;
  switch (op) {
    case Op::Add: {
      const std::int64_t upper = hi - acc;
      if (lo > upper) return std::nullopt;
      return rng.range(lo, upper);
    }
    case Op::Sub: {
      const std::int64_t upper = std::min(hi, acc);
      if (lo > upper) return std::nullopt;
      return rng.range(lo, upper);
    }
    case Op::Mul: {
      if (acc == 0) return std::nullopt;
      const std::int64_t lo_pos = std::max<std::int64_t>(lo, 1);
      const std::int64_t upper = std::min(hi, hi / acc);
      if (lo_pos > upper) return std::nullopt;
      return rng.range(lo_pos, upper);
    }
    case Op::Div: {
      if (acc == 0) return std::nullopt;
      const std::int64_t lo_pos = std::max<std::int64_t>(lo, 1);
      if (lo_pos > hi) return std::nullopt;
      std::vector<std::int64_t> divisors;
      for (std::int64_t d = 1; d * d <= acc; ++d) {
        if (acc % d != 0) continue;
        if (d >= lo_pos && d <= hi) divisors.push_back(d);
        const std::int64_t q = acc / d;
        if (q != d && q >= lo_pos && q <= hi) divisors.push_back(q);
      }
      if (divisors.empty()) return std::nullopt;
      std::sort(divisors.begin(), divisors.end());
      return divisors[static_cast<std::size_t>(rng.below(divisors.size()))];
    }
  }
  return std::nullopt;
}

}  // namespace

Instance instantiate(const EquationTemplate& tmpl,
                     std::span<const Symbol> names, const GenConfig& config,
                     std::uint64_t stream_seed) {
  config.validate();
  Equation equation = bind_symbols(tmpl, names);

  rng::Rng rng(stream_seed);
  const auto& ops = tmpl.operators();
  const int leaf_count = tmpl.leaf_count();
  std::vector<std::int64_t> leaves(static_cast<std::size_t>(leaf_count));

  std::int64_t result_value = 0;
  bool accepted = false;
  for (int attempt = 0; attempt < config.max_rejections && !accepted;
       ++attempt) {
    leaves[0] = rng.range(config.value_min, config.value_max);
    std::int64_t acc = leaves[0];
    bool ok = true;
    for (std::size_t i = 0; i < ops.size() && ok; ++i) {
      const auto rhs = draw_operand(rng, ops[i], acc, config);
      if (!rhs) {
        ok = false;
        break;
      }
      leaves[i + 1] = *rhs;
      switch (ops[i]) {
        case Op::Add: acc += *rhs; break;
        case Op::Sub: acc -= *rhs; break;
        case Op::Mul: acc *= *rhs; break;
        case Op::Div: acc /= *rhs; break;
      }
    }
    if (ok) {
      result_value = acc;
      accepted = true;
    }
  }
  if (!accepted) {
    throw SamplingFailure(tmpl.id(), config.max_rejections);
  }

  std::map<Symbol, Rational> values;
  for (int i = 0; i < leaf_count; ++i) {
    values.emplace(names[static_cast<std::size_t>(i)],
                   Rational(static_cast<long long>(
                       leaves[static_cast<std::size_t>(i)])));
  }
  values.emplace(equation.result,
                 Rational(static_cast<long long>(result_value)));

  const auto symbols = equation.symbols_in_order();
  const Symbol question_var =
      symbols[static_cast<std::size_t>(rng.below(symbols.size()))];

  std::vector<Symbol> context;
  context.reserve(symbols.size() - 1);
  for (Symbol s : symbols) {
    if (s != question_var) context.push_back(s);
  }
  if (config.randomize_context_order) {
    rng.shuffle(context);
  }

  return Instance{std::move(equation), std::move(values), question_var,
                  stream_seed, std::move(context)};
}

std::string render_input(const Instance& instance) {
  std::string out;
  for (Symbol s : instance.context_order) {
    out += s.name();
    out += '=';
    out += instance.value_of(s).to_string();
    out += ". ";
  }
  out += render_expr(instance.equation.lhs);
  out += '=';
  out += instance.equation.result.name();
  out += ". ";
  out += instance.question_var.name();
  out += '?';
  return out;
}

GeneratedExample generate_one(const GenConfig& config,
                              std::span<const EquationTemplate> inventory,
                              std::uint64_t index) {
  const std::uint64_t example_seed = rng::derive_seed(config.seed, index);
  rng::Rng selector(rng::derive_seed(example_seed, 0));

  const auto weights = effective_weights(config);
  const int op_count = 1 + static_cast<int>(selector.weighted(weights));
  std::uint64_t combos = 1;
  for (int i = 0; i < op_count; ++i) combos *= kOpCount;
  const std::uint64_t template_id =
      template_id_offset(op_count) + selector.below(combos);
  const EquationTemplate& tmpl = inventory[template_id];

  std::vector<Symbol> alphabet;
  alphabet.reserve(26);
  for (char c = 'A'; c <= 'Z'; ++c) alphabet.emplace_back(c);
  selector.shuffle(alphabet);
  std::vector<Symbol> names(
      alphabet.begin(),
      alphabet.begin() + tmpl.leaf_count() + 1);

  Instance instance =
      instantiate(tmpl, names, config, rng::derive_seed(example_seed, 1));
  return GeneratedExample{std::move(instance), tmpl, index};
}

void generate_batch(const GenConfig& config, std::uint64_t count,
                    const std::function<void(GeneratedExample&&)>& sink) {
  config.validate();
  const auto inventory = enumerate_templates(config.max_operators);
  for (std::uint64_t i = 0; i < count; ++i) {
    sink(generate_one(config, inventory, i));
  }
}

std::vector<GeneratedExample> generate_batch(const GenConfig& config,
                                             std::uint64_t count) {
  std::vector<GeneratedExample> out;
  out.reserve(count);
  generate_batch(config, count,
                 [&out](GeneratedExample&& ex) { out.push_back(std::move(ex)); });
  return out;
}

}  // namespace msat
