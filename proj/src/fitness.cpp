#include "rose/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "rose/error.hpp"
#include "rose/text_util.hpp"

namespace rose {

namespace {

constexpr std::string_view kStatsMagic = "rose-stats 1";
constexpr std::string_view kFitnessMagic = "rose-fitness 1";

void count_fillers(const FeatureStructure& fs, const InterlinguaSpec& spec, StatModel& model) {
  for (const auto& [slot, filler] : fs.slots()) {
    if (filler.is_atom()) {
      model.count(slot, InterlinguaSpec::kAtomType);
    } else if (filler.is_structure()) {
      model.count(slot, spec.type_of(filler.structure()->frame()));
      count_fillers(*filler.structure(), spec, model);
    } else {
      for (const auto& m : filler.multiple()) {
        model.count(slot, spec.type_of(m->frame()));
        count_fillers(*m, spec, model);
      }
    }
  }
}

}  // namespace

StatModel::StatModel(std::vector<std::string> slots, std::vector<std::string> types, double smoothing)
    : slots_(std::move(slots)), types_(std::move(types)), counts_(slots_.size() * types_.size(), 0.0),
      smoothing_(smoothing) {}

std::optional<std::pair<std::size_t, std::size_t>> StatModel::cell(std::string_view slot, std::string_view type) const {
  auto s = std::find(slots_.begin(), slots_.end(), slot);
  auto t = std::find(types_.begin(), types_.end(), type);
  if (s == slots_.end() || t == types_.end()) return std::nullopt;
  return std::pair(static_cast<std::size_t>(s - slots_.begin()), static_cast<std::size_t>(t - types_.begin()));
}

void StatModel::count(std::string_view slot, std::string_view type, double n) {
  auto c = cell(slot, type);
  if (!c) throw Error(ErrorCode::InvalidArgument, "no statistics cell for " + std::string(slot) + "/" + std::string(type));
  counts_[c->first * types_.size() + c->second] += n;
}

double StatModel::raw_count(std::string_view slot, std::string_view type) const {
  auto c = cell(slot, type);
  return c ? counts_[c->first * types_.size() + c->second] : 0.0;
}

double StatModel::probability(std::string_view slot, std::string_view type) const {
  auto c = cell(slot, type);
  if (!c) return 0.0;
  double total = 0;
  for (double v : counts_) total += v + smoothing_;
  return (counts_[c->first * types_.size() + c->second] + smoothing_) / total;
}

std::optional<double> StatModel::score(std::string_view slot, std::string_view filler_type) const {
  auto c = cell(slot, filler_type);
  if (!c) return std::nullopt;
  const std::size_t nt = types_.size();
  double total = 0, row = 0, col = 0;
  for (std::size_t i = 0; i < slots_.size(); ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const double v = counts_[i * nt + j] + smoothing_;
      total += v;
      if (i == c->first) row += v;
      if (j == c->second) col += v;
    }
  const double joint = counts_[c->first * nt + c->second] + smoothing_;
  return std::log2(joint * total / (row * col));
}

double StatModel::mi(std::string_view slot, std::string_view type) const { return score(slot, type).value_or(0.0); }

std::string StatModel::serialize() const {
  std::ostringstream os;
  os << kStatsMagic << '\n' << "smoothing " << format_double(smoothing_) << '\n' << "slots";
  for (const auto& s : slots_) os << ' ' << s;
  os << '\n' << "types";
  for (const auto& t : types_) os << ' ' << t;
  os << '\n';
  for (std::size_t i = 0; i < slots_.size(); ++i)
    for (std::size_t j = 0; j < types_.size(); ++j)
      if (double v = counts_[i * types_.size() + j]; v != 0)
        os << "count " << slots_[i] << ' ' << types_[j] << ' ' << format_double(v) << '\n';
  return os.str();
}

StatModel StatModel::parse(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.size() < 4 || trim(lines[0]) != kStatsMagic) throw Error(ErrorCode::Syntax, "not a rose-stats file");
  auto header = [&](std::size_t i, std::string_view word) {
    auto f = split_ws(lines[i]);
    if (f.empty() || f[0] != word) throw Error(ErrorCode::Syntax, "expected " + std::string(word) + " line");
    return std::vector<std::string>(f.begin() + 1, f.end());
  };
  auto smoothing = header(1, "smoothing");
  if (smoothing.size() != 1) throw Error(ErrorCode::Syntax, "smoothing takes one value");
  StatModel m(header(2, "slots"), header(3, "types"), parse_double(smoothing[0]));
  for (std::size_t i = 4; i < lines.size(); ++i) {
    auto f = split_ws(lines[i]);
    if (f.empty()) continue;
    if (f.size() != 4 || f[0] != "count") throw Error(ErrorCode::Syntax, "bad stats line: " + std::string(lines[i]));
    m.count(f[1], f[2], parse_double(f[3]));
  }
  return m;
}

StatModel StatModel::load(const std::string& path) { return parse(read_file(path)); }

StatModel train_mi(std::span<const FsPtr> corpus, const InterlinguaSpec& spec) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no structures to train on");
  std::vector<std::string> slots;
  for (const auto& s : spec.slot_decls()) slots.push_back(s.name);
  StatModel model(std::move(slots), spec.type_tags());
  for (const auto& fs : corpus) {
    if (!is_valid(*fs, spec)) throw Error(ErrorCode::SpecViolation, "training structure rejected by the spec: " + to_literal(*fs));
    count_fillers(*fs, spec, model);
  }
  return model;
}

FeatureTriple score_features(const Hypothesis& h, const StatModel& stats) {
  FeatureTriple f;
  f.n_ops = static_cast<double>(h.program.n_ops());
  f.size_score = h.result ? static_cast<double>(size(*h.result)) : 0.0;
  double sum = 0;
  std::size_t inserts = 0;
  for (const auto& step : h.trace) {
    if (step.kind != RepairKind::Insert) continue;
    sum += stats.mi(step.slot, step.child_type);
    ++inserts;
  }
  f.avg_stat = inserts ? sum / static_cast<double>(inserts) : 0.0;
  return f;
}

// ---- expressions ----

FitnessExpression FitnessExpression::variable(int index) { return FitnessExpression({{Op::Var, 0, index}}); }
FitnessExpression FitnessExpression::constant(double value) { return FitnessExpression({{Op::Const, value, 0}}); }

FitnessExpression FitnessExpression::binary(Op op, const FitnessExpression& a, const FitnessExpression& b) {
  std::vector<Node> nodes{{op, 0, 0}};
  nodes.insert(nodes.end(), a.nodes_.begin(), a.nodes_.end());
  nodes.insert(nodes.end(), b.nodes_.begin(), b.nodes_.end());
  return FitnessExpression(std::move(nodes));
}

std::size_t FitnessExpression::subtree_end(std::size_t i) const {
  std::size_t open = 1;
  while (open > 0 && i < nodes_.size()) {
    const Op op = nodes_[i].op;
    open += (op == Op::Var || op == Op::Const) ? 0 : 2;
    --open;
    ++i;
  }
  return i;
}

std::size_t FitnessExpression::depth() const {
  std::size_t best = 0;
  std::vector<std::size_t> pending;
  std::size_t d = 0;
  for (const auto& n : nodes_) {
    best = std::max(best, d);
    if (n.op != Op::Var && n.op != Op::Const) {
      pending.push_back(d + 1);
      pending.push_back(d + 1);
    }
    if (pending.empty()) break;
    d = pending.back();
    pending.pop_back();
  }
  return best;
}

double FitnessExpression::evaluate(const FeatureTriple& f) const {
  const auto vars = f.vars();
  // Prefix order read backwards: both operands are on the stack, left on top.
  double stack[64] = {};
  std::vector<double> spill;
  double* st = nodes_.size() <= 64 ? stack : (spill.resize(nodes_.size()), spill.data());
  std::size_t top = 0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    const Node& n = nodes_[i];
    if (n.op == Op::Var) {
      st[top++] = vars[static_cast<std::size_t>(n.var)];
      continue;
    }
    if (n.op == Op::Const) {
      st[top++] = n.value;
      continue;
    }
    const double a = st[--top];
    const double b = st[--top];
    double r;
    switch (n.op) {
      case Op::Add: r = a + b; break;
      case Op::Sub: r = a - b; break;
      case Op::Mul: r = a * b; break;
      default: r = b == 0 ? 1.0 : a / b; break;
    }
    st[top++] = r;
  }
  return st[0];
}

std::string FitnessExpression::to_string() const {
  std::string out;
  std::size_t i = 0;
  std::function<void()> emit = [&] {
    const Node& n = nodes_[i++];
    switch (n.op) {
      case Op::Var: out += "x" + std::to_string(n.var + 1); return;
      case Op::Const: out += format_double(n.value); return;
      case Op::Add: out += "(+ "; break;
      case Op::Sub: out += "(- "; break;
      case Op::Mul: out += "(* "; break;
      case Op::Div: out += "(/ "; break;
    }
    emit();
    out += ' ';
    emit();
    out += ')';
  };
  emit();
  return out;
}

FitnessExpression FitnessExpression::parse(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
    } else if (c == '(' || c == ')') {
      tokens.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < text.size() && text[j] != ' ' && text[j] != '(' && text[j] != ')' && text[j] != '\n' &&
             text[j] != '\t' && text[j] != '\r')
        ++j;
      tokens.emplace_back(text.substr(i, j - i));
      i = j;
    }
  }
  std::size_t pos = 0;
  std::vector<Node> nodes;
  auto fail = [](const std::string& why) { throw Error(ErrorCode::Syntax, "fitness expression: " + why); };
  std::function<void()> read = [&] {
    if (pos >= tokens.size()) fail("unexpected end");
    const std::string& t = tokens[pos++];
    if (t == "(") {
      if (pos >= tokens.size()) fail("unexpected end");
      const std::string& op = tokens[pos++];
      Op o;
      if (op == "+") o = Op::Add;
      else if (op == "-") o = Op::Sub;
      else if (op == "*") o = Op::Mul;
      else if (op == "/") o = Op::Div;
      else fail("unknown operator " + op);
      nodes.push_back({o, 0, 0});
      read();
      read();
      if (pos >= tokens.size() || tokens[pos++] != ")") fail("expected )");
    } else if (t.size() == 2 && t[0] == 'x' && t[1] >= '1' && t[1] <= '3') {
      nodes.push_back({Op::Var, 0, t[1] - '1'});
    } else if (t == ")") {
      fail("unexpected )");
    } else {
      nodes.push_back({Op::Const, parse_double(t), 0});
    }
  };
  read();
  if (pos != tokens.size()) fail("trailing input");
  return FitnessExpression(std::move(nodes));
}

std::string FitnessExpression::serialize() const { return std::string(kFitnessMagic) + "\n" + to_string() + "\n"; }

FitnessExpression FitnessExpression::deserialize(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.size() < 2 || trim(lines[0]) != kFitnessMagic) throw Error(ErrorCode::Syntax, "not a rose-fitness file");
  std::string body;
  for (std::size_t i = 1; i < lines.size(); ++i) body += std::string(lines[i]) + " ";
  return parse(body);
}

FitnessExpression FitnessExpression::load(const std::string& path) { return deserialize(read_file(path)); }

// ---- training ----

namespace {

struct Pair {
  FeatureTriple better;
  FeatureTriple worse;
};

std::vector<Pair> training_pairs(std::span<const RankedExample> examples) {
  std::vector<Pair> pairs;
  for (const auto& ex : examples) {
    for (std::size_t i = 0; i < ex.entries.size(); ++i)
      for (std::size_t j = i + 1; j < ex.entries.size(); ++j) {
        if (ex.entries[i] == ex.entries[j]) continue;
        if (!ex.tier.empty() && ex.tier[i] == ex.tier[j]) continue;
        pairs.push_back({ex.entries[i], ex.entries[j]});
      }
  }
  return pairs;
}

double accuracy(const FitnessExpression& f, const std::vector<Pair>& pairs) {
  if (pairs.empty()) return 1.0;
  std::size_t ok = 0;
  for (const auto& p : pairs)
    if (f.evaluate(p.better) > f.evaluate(p.worse)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(pairs.size());
}

using Expr = FitnessExpression;
using Node = FitnessExpression::Node;
using Op = FitnessExpression::Op;

class ExprGp {
 public:
  ExprGp(const GpParams& p, const std::vector<Pair>& pairs) : params_(p), pairs_(pairs), rng_(p.seed) {}

  Expr run() {
    std::vector<Scored> pop;
    for (int v = 0; v < 3; ++v) {
      pop.push_back(score(Expr::variable(v)));
      pop.push_back(score(Expr::binary(Op::Mul, Expr::constant(-1), Expr::variable(v))));
    }
    while (pop.size() < params_.population) pop.push_back(score(random_tree(1 + pick(std::min<std::size_t>(4, params_.max_depth)))));
    sort(pop);
    pop.resize(params_.population);
    Scored best = pop.front();
    std::size_t stale = 0;
    for (std::size_t gen = 1; gen < params_.generations && stale < params_.patience; ++gen) {
      std::vector<Scored> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(params_.elites));
      while (next.size() < params_.population) {
        Expr a = tournament(pop).expr;
        if (chance(params_.crossover_rate)) {
          Expr b = tournament(pop).expr;
          a = crossover(a, b);
        }
        if (chance(params_.mutation_rate)) a = mutate(a);
        next.push_back(score(std::move(a)));
      }
      pop = std::move(next);
      sort(pop);
      if (better(pop.front(), best)) {
        best = pop.front();
        stale = 0;
      } else {
        ++stale;
      }
    }
    return best.expr;
  }

 private:
  struct Scored {
    Expr expr;
    double acc;
    std::string key;
  };

  Scored score(Expr e) {
    std::string key = e.to_string();
    double acc = accuracy(e, pairs_);
    return {std::move(e), acc, std::move(key)};
  }
  static bool better(const Scored& a, const Scored& b) {
    if (a.acc != b.acc) return a.acc > b.acc;
    if (a.expr.nodes().size() != b.expr.nodes().size()) return a.expr.nodes().size() < b.expr.nodes().size();
    return a.key < b.key;
  }
  static void sort(std::vector<Scored>& pop) { std::stable_sort(pop.begin(), pop.end(), better); }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  Expr random_tree(std::size_t depth) {
    if (depth == 0 || chance(0.3)) {
      if (chance(0.7)) return Expr::variable(static_cast<int>(pick(3)));
      return Expr::constant(kFitnessConstants[pick(kFitnessConstants.size())]);
    }
    static constexpr Op ops[] = {Op::Add, Op::Sub, Op::Mul, Op::Div};
    const Op op = ops[pick(4)];
    Expr l = random_tree(depth - 1);
    Expr r = random_tree(depth - 1);
    return Expr::binary(op, l, r);
  }

  static Expr splice(const Expr& host, std::size_t at, const Expr& donor, std::size_t from) {
    const auto& h = host.nodes();
    const auto& d = donor.nodes();
    std::vector<Node> out(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(at));
    out.insert(out.end(), d.begin() + static_cast<std::ptrdiff_t>(from),
               d.begin() + static_cast<std::ptrdiff_t>(donor.subtree_end(from)));
    out.insert(out.end(), h.begin() + static_cast<std::ptrdiff_t>(host.subtree_end(at)), h.end());
    return Expr(std::move(out));
  }

  Expr crossover(const Expr& a, const Expr& b) {
    Expr child = splice(a, pick(a.nodes().size()), b, pick(b.nodes().size()));
    return child.depth() <= params_.max_depth ? child : a;
  }

  Expr mutate(const Expr& a) {
    Expr child = splice(a, pick(a.nodes().size()), random_tree(pick(3)), 0);
    return child.depth() <= params_.max_depth ? child : a;
  }

  const Scored& tournament(const std::vector<Scored>& pop) {
    const Scored* best = &pop[pick(pop.size())];
    for (std::size_t k = 1; k < params_.tournament; ++k) {
      const Scored& c = pop[pick(pop.size())];
      if (better(c, *best)) best = &c;
    }
    return *best;
  }

  GpParams params_;
  const std::vector<Pair>& pairs_;
  std::mt19937_64 rng_;
};

}  // namespace

double pairwise_accuracy(const FitnessExpression& f, std::span<const RankedExample> examples) {
  return accuracy(f, training_pairs(examples));
}

FitnessExpression train_fitness(std::span<const RankedExample> examples, const GpParams& params) {
  params.check();
  if (examples.empty()) throw Error(ErrorCode::InvalidArgument, "no ranked examples");
  const auto pairs = training_pairs(examples);
  return ExprGp(params, pairs).run();
}

std::vector<std::size_t> ideal_rank(std::span<const Hypothesis> hypotheses, const FeatureStructure& gold) {
  std::vector<double> f1(hypotheses.size(), 0.0);
  for (std::size_t i = 0; i < hypotheses.size(); ++i)
    if (hypotheses[i].result) f1[i] = similarity(*hypotheses[i].result, gold).f1;
  std::vector<std::size_t> order(hypotheses.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (f1[a] != f1[b]) return f1[a] > f1[b];
    return hypotheses[a].program.n_ops() < hypotheses[b].program.n_ops();
  });
  return order;
}

}  // namespace rose
