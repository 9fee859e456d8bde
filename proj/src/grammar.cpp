#include "rose/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "rose/error.hpp"
#include "rose/text_util.hpp"

namespace rose {

// ---------------------------------------------------------------------------
// ActionTemplate

namespace {

class ActionParser {
 public:
  ActionParser(std::string_view text, std::vector<ActionTemplate::Node>& nodes) : text_(text), nodes_(nodes) {}

  std::size_t parse_all() {
    std::size_t root = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return root;
  }

 private:
  using Kind = ActionTemplate::Kind;

  std::size_t expr() {
    skip_ws();
    if (peek() == '$') {
      ++pos_;
      std::string_view digits = word();
      if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        fail("expected child index after '$'");
      ActionTemplate::Node n;
      n.kind = Kind::ChildRef;
      n.child = std::stoul(std::string(digits));
      if (n.child == 0) throw Error(ErrorCode::BadAction, "child references are 1-based");
      return push(std::move(n));
    }
    std::string_view w = word();
    if (w.empty()) fail("expected expression");
    skip_ws();
    if (peek() == '(' && w == "frame") {
      ++pos_;
      ActionTemplate::Node n;
      n.kind = Kind::MakeFrame;
      n.name = std::string(word());
      if (n.name.empty()) fail("expected frame name");
      for (skip_ws(); peek() == ','; skip_ws()) {
        ++pos_;
        std::string slot(word());
        if (slot.empty()) fail("expected slot name");
        expect('=');
        std::size_t value = expr();
        n.assignments.emplace_back(std::move(slot), value);
      }
      expect(')');
      return push(std::move(n));
    }
    if (peek() == '(' && w == "set") {
      ++pos_;
      ActionTemplate::Node n;
      n.kind = Kind::SetSlot;
      n.target = expr();
      expect(',');
      n.name = std::string(word());
      if (n.name.empty()) fail("expected slot name");
      expect(',');
      n.value = expr();
      expect(')');
      return push(std::move(n));
    }
    ActionTemplate::Node n;
    n.kind = Kind::AtomLit;
    n.atom = Atom::from_text(std::string(w));
    return push(std::move(n));
  }

  std::size_t push(ActionTemplate::Node n) {
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }
  std::string_view word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '(' || c == ')' || c == ',' || c == '=' || c == '$') break;
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Syntax, "action '" + std::string(text_) + "': " + msg);
  }

  std::string_view text_;
  std::vector<ActionTemplate::Node>& nodes_;
  std::size_t pos_ = 0;
};

}  // namespace

ActionTemplate ActionTemplate::parse(std::string_view text) {
  ActionTemplate t;
  if (trim(text).empty()) return t;
  ActionParser parser(text, t.nodes_);
  t.root_ = parser.parse_all();
  return t;
}

ActionTemplate ActionTemplate::child_ref(std::size_t index) {
  ActionTemplate t;
  Node n;
  n.kind = Kind::ChildRef;
  n.child = index;
  t.nodes_.push_back(std::move(n));
  return t;
}

std::string ActionTemplate::to_string() const { return empty() ? std::string() : print(root_); }

std::string ActionTemplate::print(std::size_t i) const {
  const Node& n = nodes_[i];
  switch (n.kind) {
    case Kind::ChildRef: return "$" + std::to_string(n.child);
    case Kind::AtomLit: return n.atom.text;
    case Kind::MakeFrame: {
      std::string s = "frame(" + n.name;
      for (const auto& [slot, v] : n.assignments) s += ", " + slot + "=" + print(v);
      return s + ")";
    }
    case Kind::SetSlot: return "set(" + print(n.target) + ", " + n.name + ", " + print(n.value) + ")";
  }
  return {};
}

std::size_t ActionTemplate::max_child_ref() const {
  std::size_t m = 0;
  for (const auto& n : nodes_)
    if (n.kind == Kind::ChildRef) m = std::max(m, n.child);
  return m;
}

std::optional<std::string> ActionTemplate::result_frame() const {
  if (empty()) return std::nullopt;
  std::size_t i = root_;
  while (nodes_[i].kind == Kind::SetSlot) i = nodes_[i].target;
  if (nodes_[i].kind == Kind::MakeFrame) return nodes_[i].name;
  return std::nullopt;
}

std::optional<Value> ActionTemplate::evaluate(std::span<const Value> children) const {
  if (empty()) return Value{};
  return eval(root_, children);
}

std::optional<Value> ActionTemplate::eval(std::size_t i, std::span<const Value> children) const {
  const Node& n = nodes_[i];
  switch (n.kind) {
    case Kind::ChildRef:
      if (n.child == 0 || n.child > children.size()) return std::nullopt;
      return children[n.child - 1];
    case Kind::AtomLit: return Value{n.atom};
    case Kind::MakeFrame: {
      auto fs = std::make_shared<FeatureStructure>(n.name);
      for (const auto& [slot, vi] : n.assignments) {
        auto v = eval(vi, children);
        if (!v) return std::nullopt;
        if (auto* a = std::get_if<Atom>(&*v)) fs->set(slot, *a);
        else if (auto* f = std::get_if<FsPtr>(&*v)) fs->set(slot, *f);
      }
      return Value{FsPtr(std::move(fs))};
    }
    case Kind::SetSlot: {
      auto target = eval(n.target, children);
      if (!target) return std::nullopt;
      const auto* base = std::get_if<FsPtr>(&*target);
      if (!base) return std::nullopt;
      auto v = eval(n.value, children);
      if (!v) return std::nullopt;
      if (std::holds_alternative<std::monostate>(*v)) return target;
      auto fs = std::make_shared<FeatureStructure>(**base);
      if (auto* a = std::get_if<Atom>(&*v)) fs->set(n.name, *a);
      else fs->set(n.name, std::get<FsPtr>(*v));
      return Value{FsPtr(std::move(fs))};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Grammar

SymbolId Grammar::intern(std::string_view name) {
  auto it = ids_.find(name);
  if (it != ids_.end()) return it->second;
  SymbolId id = static_cast<SymbolId>(names_.size());
  names_.emplace_back(name);
  terminal_.push_back(false);
  declared_terminal_.push_back(false);
  ids_.emplace(std::string(name), id);
  return id;
}

std::optional<SymbolId> Grammar::find(std::string_view name) const {
  auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

Grammar Grammar::parse(std::string_view text) {
  Grammar g;
  g.intern("$");
  g.terminal_[kEnd] = true;
  std::optional<SymbolId> start;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto where = [&] { return "line " + std::to_string(line_no) + ": "; };

    if (line.front() == '%') {
      auto parts = split_ws(line);
      if (parts[0] == "%start") {
        if (parts.size() != 2) throw Error(ErrorCode::Syntax, where() + "%start takes one symbol");
        if (start) throw Error(ErrorCode::DuplicateStart, where() + "start symbol declared twice");
        start = g.intern(parts[1]);
      } else if (parts[0] == "%terminal") {
        for (std::size_t i = 1; i < parts.size(); ++i) g.declared_terminal_[g.intern(parts[i])] = true;
      } else if (parts[0] == "%frame") {
        if (parts.size() != 3) throw Error(ErrorCode::Syntax, where() + "%frame takes a nonterminal and a frame");
        g.frame_decls_.emplace_back(g.intern(parts[1]), std::string(parts[2]));
      } else {
        throw Error(ErrorCode::Syntax, where() + "unknown directive " + std::string(parts[0]));
      }
      continue;
    }

    if (auto lex = line.find("::"); lex != std::string_view::npos) {
      std::string token(trim(line.substr(0, lex)));
      std::string_view rest = line.substr(lex + 2);
      auto colon = rest.find(':');
      if (token.empty() || colon == std::string_view::npos)
        throw Error(ErrorCode::Syntax, where() + "expected 'token :: CATEGORY : value'");
      std::string_view category = trim(rest.substr(0, colon));
      if (category.empty() || split_ws(category).size() != 1)
        throw Error(ErrorCode::Syntax, where() + "expected one category");
      SymbolId cat = g.intern(category);
      g.declared_terminal_[cat] = true;
      Value value;
      try {
        value = parse_value(trim(rest.substr(colon + 1)));
      } catch (const Error& e) {
        throw Error(ErrorCode::Syntax, where() + e.what());
      }
      g.lexicon_[token].push_back({cat, std::move(value)});
      continue;
    }

    auto arrow = line.find("->");
    if (arrow == std::string_view::npos) throw Error(ErrorCode::Syntax, where() + "expected a rule, lexical entry or directive");
    auto lhs_parts = split_ws(line.substr(0, arrow));
    if (lhs_parts.size() != 1) throw Error(ErrorCode::Syntax, where() + "rule needs exactly one lhs symbol");
    std::string_view body = line.substr(arrow + 2);
    std::string_view action_text;
    if (auto colon = body.find(':'); colon != std::string_view::npos) {
      action_text = trim(body.substr(colon + 1));
      body = body.substr(0, colon);
    }
    Rule r;
    r.lhs = g.intern(lhs_parts[0]);
    for (auto sym : split_ws(body)) {
      if (sym == "->") throw Error(ErrorCode::Syntax, where() + "second '->' in rule");
      r.rhs.push_back(g.intern(sym));
    }
    try {
      r.action = ActionTemplate::parse(action_text);
    } catch (const Error& e) {
      throw Error(e.code(), where() + e.what());
    }
    if (r.action.empty() && !r.rhs.empty() && action_text.empty()) r.action = ActionTemplate::child_ref(1);
    if (r.action.max_child_ref() > r.rhs.size())
      throw Error(ErrorCode::BadAction, where() + "child reference $" + std::to_string(r.action.max_child_ref()) +
                                            " exceeds rhs length " + std::to_string(r.rhs.size()));
    g.rules_.push_back(std::move(r));
  }

  if (g.rules_.empty()) throw Error(ErrorCode::Syntax, "grammar has no rules");
  g.start_ = start.value_or(g.rules_.front().lhs);
  g.finalize();
  return g;
}

Grammar Grammar::load(const std::string& path) { return parse(read_file(path)); }

void Grammar::finalize() {
  std::vector<bool> is_lhs(names_.size(), false);
  for (const auto& r : rules_) is_lhs[r.lhs] = true;
  for (SymbolId s = 1; s < names_.size(); ++s) {
    if (declared_terminal_[s] && is_lhs[s])
      throw Error(ErrorCode::Syntax, "symbol " + names_[s] + " is both a terminal and a rule lhs");
    terminal_[s] = declared_terminal_[s];
  }
  for (const auto& r : rules_)
    for (SymbolId s : r.rhs)
      if (!terminal_[s] && !is_lhs[s])
        throw Error(ErrorCode::UndefinedSymbol, "symbol " + names_[s] + " is neither a terminal nor a rule lhs");
  if (!is_lhs[start_]) throw Error(ErrorCode::UndefinedSymbol, "start symbol " + names_[start_] + " has no rule");

  // Least yield by fixpoint: costs only ever decrease and are bounded below.
  min_yield_.assign(names_.size(), std::nullopt);
  for (SymbolId s = 1; s < names_.size(); ++s)
    if (terminal_[s]) min_yield_[s] = 1;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rules_) {
      std::size_t total = 0;
      bool ok = true;
      for (SymbolId s : r.rhs) {
        if (!min_yield_[s]) {
          ok = false;
          break;
        }
        total += *min_yield_[s];
      }
      if (ok && (!min_yield_[r.lhs] || total < *min_yield_[r.lhs])) {
        min_yield_[r.lhs] = total;
        changed = true;
      }
    }
  }
  for (SymbolId s = 0; s < names_.size(); ++s)
    if (terminal_[s]) min_yield_[s] = std::nullopt;

  result_frames_.assign(names_.size(), std::nullopt);
  for (SymbolId nt = 1; nt < names_.size(); ++nt) {
    if (terminal_[nt]) continue;
    std::optional<std::string> common;
    bool consistent = true;
    for (const auto& r : rules_) {
      if (r.lhs != nt) continue;
      auto f = r.action.result_frame();
      if (!f || (common && *common != *f)) {
        consistent = false;
        break;
      }
      common = f;
    }
    if (consistent) result_frames_[nt] = common;
  }
  for (const auto& [nt, frame] : frame_decls_) {
    if (terminal_[nt] || !is_lhs[nt])
      throw Error(ErrorCode::UndefinedSymbol, "%frame names " + names_[nt] + ", which is not a nonterminal");
    result_frames_[nt] = frame;
  }
}

std::vector<SymbolId> Grammar::terminals() const {
  std::vector<SymbolId> out;
  for (SymbolId s = 1; s < names_.size(); ++s)
    if (terminal_[s]) out.push_back(s);
  return out;
}

std::vector<SymbolId> Grammar::nonterminals() const {
  std::vector<SymbolId> out;
  for (SymbolId s = 1; s < names_.size(); ++s)
    if (!terminal_[s]) out.push_back(s);
  return out;
}

std::vector<LexicalEntry> Grammar::lookup(std::string_view token) const {
  auto it = lexicon_.find(std::string(token));
  if (it != lexicon_.end()) return it->second;
  if (auto id = find(token); id && *id != kEnd && terminal_[*id]) return {LexicalEntry{*id, Atom::symbol(std::string(token))}};
  return {};
}

std::string Grammar::serialize() const {
  std::ostringstream os;
  os << "%start " << names_[start_] << '\n';
  auto terms = terminals();
  if (!terms.empty()) {
    os << "%terminal";
    for (SymbolId t : terms) os << ' ' << names_[t];
    os << '\n';
  }
  for (const auto& [nt, frame] : frame_decls_) os << "%frame " << names_[nt] << ' ' << frame << '\n';
  for (const auto& r : rules_) {
    os << names_[r.lhs] << " ->";
    for (SymbolId s : r.rhs) os << ' ' << names_[s];
    if (!r.action.empty()) os << " : " << r.action.to_string();
    os << '\n';
  }
  for (const auto& [token, entries] : lexicon_)
    for (const auto& e : entries) os << token << " :: " << names_[e.category] << " : " << to_literal(e.value) << '\n';
  return os.str();
}

std::uint64_t Grammar::hash() const { return fnv1a(serialize()); }

Grammar load_grammar(std::string_view text) { return Grammar::parse(text); }

std::size_t min_yield(const Grammar& g, std::string_view nonterminal) {
  auto id = g.find(nonterminal);
  if (!id || g.is_terminal(*id)) throw Error(ErrorCode::UndefinedSymbol, "no nonterminal named " + std::string(nonterminal));
  auto y = g.min_yield_of(*id);
  if (!y) throw Error(ErrorCode::NonproductiveSymbol, std::string(nonterminal) + " derives no terminal string");
  return *y;
}

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  for (auto w : split_ws(sentence)) {
    std::string t;
    for (char c : w) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    auto punct = [](char c) { return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == '"'; };
    while (!t.empty() && punct(t.back())) t.pop_back();
    while (!t.empty() && punct(t.front())) t.erase(t.begin());
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace rose
