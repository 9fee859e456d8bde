#include "rose/program.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "rose/error.hpp"

namespace rose {

RepairProgram RepairProgram::leaf(std::uint32_t chunk) { return RepairProgram({{false, chunk}}); }

RepairProgram RepairProgram::comb(const RepairProgram& left, const RepairProgram& right) {
  std::vector<Node> nodes;
  nodes.reserve(left.nodes_.size() + right.nodes_.size() + 1);
  nodes.push_back({true, 0});
  nodes.insert(nodes.end(), left.nodes_.begin(), left.nodes_.end());
  nodes.insert(nodes.end(), right.nodes_.begin(), right.nodes_.end());
  return RepairProgram(std::move(nodes));
}

std::size_t RepairProgram::subtree_end(std::size_t i) const {
  std::size_t open = 1;
  while (open > 0 && i < nodes_.size()) {
    open += nodes_[i].comb ? 2 : 0;
    --open;
    ++i;
  }
  return i;
}

RepairProgram RepairProgram::subtree(std::size_t i) const {
  return RepairProgram({nodes_.begin() + static_cast<std::ptrdiff_t>(i),
                        nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i))});
}

RepairProgram RepairProgram::replace_subtree(std::size_t i, const RepairProgram& with) const {
  std::vector<Node> out(nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(i));
  out.insert(out.end(), with.nodes_.begin(), with.nodes_.end());
  out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(i)), nodes_.end());
  return RepairProgram(std::move(out));
}

std::size_t RepairProgram::depth() const {
  std::size_t best = 0;
  std::vector<std::size_t> stack;  // depth of each pending child slot
  std::size_t d = 0;
  for (const auto& n : nodes_) {
    best = std::max(best, d);
    if (n.comb) {
      stack.push_back(d + 1);
      stack.push_back(d + 1);
    }
    if (stack.empty()) break;
    d = stack.back();
    stack.pop_back();
  }
  return best;
}

std::size_t RepairProgram::n_ops() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.comb; }));
}

std::vector<std::uint32_t> RepairProgram::leaves() const {
  std::vector<std::uint32_t> out;
  for (const auto& n : nodes_)
    if (!n.comb) out.push_back(n.chunk);
  return out;
}

bool RepairProgram::valid(std::size_t chunk_count) const {
  if (nodes_.empty() || subtree_end(0) != nodes_.size()) return false;
  std::size_t open = 1;
  for (const auto& n : nodes_) {
    if (open == 0) return false;
    open += n.comb ? 2 : 0;
    --open;
  }
  if (open != 0) return false;
  auto ls = leaves();
  std::sort(ls.begin(), ls.end());
  if (std::adjacent_find(ls.begin(), ls.end()) != ls.end()) return false;
  return ls.back() < chunk_count;
}

std::string RepairProgram::key() const {
  std::string out;
  std::size_t i = 0;
  std::function<void()> emit = [&] {
    const Node& n = nodes_[i++];
    if (!n.comb) {
      out += std::to_string(n.chunk);
      return;
    }
    out += "(C ";
    emit();
    out += ' ';
    emit();
    out += ')';
  };
  if (!nodes_.empty()) emit();
  return out;
}

const char* to_string(RepairKind kind) {
  switch (kind) {
    case RepairKind::Insert: return "insert";
    case RepairKind::Merge: return "merge";
    case RepairKind::FallbackLargest: return "fallback-largest";
  }
  return "?";
}

std::string format_hypothesis(const Hypothesis& h, const std::vector<FsPtr>& chunks, const InterlinguaSpec& spec) {
  const auto& nodes = h.program.nodes();
  std::ostringstream os;
  std::size_t i = 0;
  std::size_t comb_index = 0;
  std::function<void(int)> emit = [&](int indent) {
    const auto& n = nodes[i++];
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (!n.comb) {
      os << pad << to_literal(*chunks[n.chunk], spec);
      return;
    }
    const std::size_t mine = comb_index++;
    os << pad << "(MY-COMB\n";
    emit(indent + 2);
    os << '\n';
    emit(indent + 2);
    os << '\n' << pad << "  " << (mine < h.slots.size() ? h.slots[mine] : std::string("??")) << ')';
  };
  if (!nodes.empty()) emit(0);
  return os.str();
}

void GpParams::check() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!rate_ok(crossover_rate) || !rate_ok(mutation_rate))
    throw Error(ErrorCode::InvalidArgument, "GP rates must lie in [0,1]");
  if (population == 0 || generations == 0 || tournament == 0 || max_depth == 0)
    throw Error(ErrorCode::InvalidArgument, "GP sizes must be positive");
  if (elites > population) throw Error(ErrorCode::InvalidArgument, "more elites than population");
}

}  // namespace rose
