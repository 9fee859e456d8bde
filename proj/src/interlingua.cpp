#include "rose/interlingua.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rose/error.hpp"
#include "rose/text_util.hpp"

namespace rose {

namespace {

constexpr std::string_view kFrameKey = "FRAME";
constexpr std::string_view kMultipleKey = "*MULTIPLE*";

std::size_t mix(std::size_t seed, std::size_t h) {
  return seed ^ (h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Atom Atom::from_text(std::string text) {
  double parsed = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, parsed);
  if (!text.empty() && ec == std::errc() && ptr == last) return number(std::move(text));
  return symbol(std::move(text));
}

bool operator==(const Filler& a, const Filler& b) {
  if (a.value.index() != b.value.index()) return false;
  if (a.is_atom()) return a.atom() == b.atom();
  if (a.is_structure()) return *a.structure() == *b.structure();
  const auto& ma = a.multiple();
  const auto& mb = b.multiple();
  return std::equal(ma.begin(), ma.end(), mb.begin(), mb.end(),
                    [](const FsPtr& x, const FsPtr& y) { return *x == *y; });
}

const Filler* FeatureStructure::find(std::string_view slot) const {
  auto it = slots_.find(slot);
  return it == slots_.end() ? nullptr : &it->second;
}

bool FeatureStructure::erase(std::string_view slot) {
  auto it = slots_.find(slot);
  if (it == slots_.end()) return false;
  slots_.erase(it);
  return true;
}

bool operator==(const FeatureStructure& a, const FeatureStructure& b) {
  if (&a == &b) return true;
  return a.frame_ == b.frame_ && a.synthetic_ == b.synthetic_ && a.slots_ == b.slots_;
}

bool values_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (const auto* fa = std::get_if<FsPtr>(&a)) {
    const auto& fb = std::get<FsPtr>(b);
    return fa->get() == fb.get() || **fa == *fb;
  }
  if (const auto* aa = std::get_if<Atom>(&a)) return *aa == std::get<Atom>(b);
  return true;
}

std::size_t hash_fs(const FeatureStructure& fs) {
  std::hash<std::string> hs;
  std::size_t h = mix(hs(fs.frame()), fs.synthetic() ? 1 : 0);
  for (const auto& [name, filler] : fs.slots()) {
    h = mix(h, hs(name));
    if (filler.is_atom()) {
      h = mix(h, hs(filler.atom().text));
    } else if (filler.is_structure()) {
      h = mix(h, hash_fs(*filler.structure()));
    } else {
      for (const auto& e : filler.multiple()) h = mix(h, hash_fs(*e));
    }
  }
  return h;
}

std::size_t hash_value(const Value& v) {
  if (const auto* fs = std::get_if<FsPtr>(&v)) return mix(2, hash_fs(**fs));
  if (const auto* a = std::get_if<Atom>(&v)) return mix(1, std::hash<std::string>{}(a->text));
  return 0;
}

// ---------------------------------------------------------------------------
// Literal reader

namespace {

class LiteralReader {
 public:
  explicit LiteralReader(std::string_view text) : text_(text) {}

  Value read_value() {
    skip_ws();
    if (peek() == '(') return read_structure();
    return Atom::from_text(std::string(read_atom()));
  }

  FsPtr read_structure() {
    expect('(');
    std::string frame;
    bool has_frame = false;
    std::vector<std::pair<std::string, Filler>> slots;
    for (skip_ws(); peek() != ')'; skip_ws()) {
      expect('(');
      std::string name(read_atom());
      skip_ws();
      if (name == kFrameKey) {
        if (has_frame) fail("duplicate FRAME");
        frame = std::string(read_atom());
        has_frame = true;
      } else {
        for (const auto& s : slots)
          if (s.first == name) fail("duplicate slot " + name);
        slots.emplace_back(name, read_filler());
      }
      skip_ws();
      expect(')');
    }
    expect(')');
    if (!has_frame) fail("structure without FRAME");
    auto result = std::make_shared<FeatureStructure>(frame);
    for (auto& [name, filler] : slots) result->set(std::move(name), std::move(filler));
    return result;
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
  }

 private:
  Filler read_filler() {
    if (peek() != '(') return Filler{Atom::from_text(std::string(read_atom()))};
    // Distinguish (*MULTIPLE* ...) from a nested structure ((FRAME ..) ..).
    std::size_t save = pos_;
    ++pos_;
    skip_ws();
    if (peek() != '(') {
      std::string_view head = read_atom();
      if (head != kMultipleKey) fail("expected structure or *MULTIPLE*");
      Filler::Multiple elems;
      for (skip_ws(); peek() != ')'; skip_ws()) elems.push_back(read_structure());
      expect(')');
      if (elems.size() < 2) fail("*MULTIPLE* needs at least two elements");
      return Filler{std::move(elems)};
    }
    pos_ = save;
    return Filler{read_structure()};
  }

  std::string_view read_atom() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected atom");
    return text_.substr(start, pos_ - start);
  }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  void skip_ws() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Syntax, "feature structure literal at offset " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FsPtr parse_fs(std::string_view text) {
  LiteralReader reader(text);
  FsPtr fs = reader.read_structure();
  reader.finish();
  return fs;
}

Value parse_value(std::string_view text) {
  LiteralReader reader(text);
  Value v = reader.read_value();
  reader.finish();
  return v;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

using SlotOrder = std::function<std::vector<const std::pair<const std::string, Filler>*>(const FeatureStructure&)>;

void print_fs(std::ostream& os, const FeatureStructure& fs, const SlotOrder& order) {
  os << "((FRAME " << fs.frame() << ")";
  for (const auto* entry : order(fs)) {
    os << " (" << entry->first << ' ';
    const Filler& f = entry->second;
    if (f.is_atom()) {
      os << f.atom().text;
    } else if (f.is_structure()) {
      print_fs(os, *f.structure(), order);
    } else {
      os << '(' << kMultipleKey;
      for (const auto& e : f.multiple()) {
        os << ' ';
        print_fs(os, *e, order);
      }
      os << ')';
    }
    os << ')';
  }
  os << ')';
}

std::vector<const std::pair<const std::string, Filler>*> alphabetical(const FeatureStructure& fs) {
  std::vector<const std::pair<const std::string, Filler>*> out;
  for (const auto& entry : fs.slots()) out.push_back(&entry);
  return out;
}

}  // namespace

std::string to_literal(const FeatureStructure& fs) {
  std::ostringstream os;
  print_fs(os, fs, alphabetical);
  return os.str();
}

std::string to_literal(const FeatureStructure& fs, const InterlinguaSpec& spec) {
  SlotOrder declared = [&spec](const FeatureStructure& s) {
    std::vector<const std::pair<const std::string, Filler>*> out;
    std::set<std::string_view> seen;
    if (const auto* decl = spec.frame(s.frame())) {
      for (const auto& name : decl->slots) {
        auto it = s.slots().find(name);
        if (it != s.slots().end()) {
          out.push_back(&*it);
          seen.insert(name);
        }
      }
    }
    for (const auto& entry : s.slots())
      if (!seen.count(entry.first)) out.push_back(&entry);
    return out;
  };
  std::ostringstream os;
  print_fs(os, fs, declared);
  return os.str();
}

std::string to_literal(const Value& v) {
  if (const auto* fs = std::get_if<FsPtr>(&v)) return to_literal(**fs);
  if (const auto* a = std::get_if<Atom>(&v)) return a->text;
  return "NIL";
}

std::string to_literal(const Value& v, const InterlinguaSpec& spec) {
  if (const auto* fs = std::get_if<FsPtr>(&v)) return to_literal(**fs, spec);
  return to_literal(v);
}

// ---------------------------------------------------------------------------
// InterlinguaSpec

InterlinguaSpec InterlinguaSpec::parse(std::string_view text) {
  InterlinguaSpec spec;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw Error(ErrorCode::InvalidSpec, "line " + std::to_string(line_no) + ": " + msg);
    };
    auto colon = line.find(':');
    if (colon == std::string_view::npos) fail("expected ':'");
    auto head = split_ws(line.substr(0, colon));
    auto body = split_ws(line.substr(colon + 1));
    if (head.size() != 2) fail("expected '<kind> <name> : ...'");
    std::string kind(head[0]);
    std::string name(head[1]);
    std::vector<std::string> items(body.begin(), body.end());
    if (kind == "type") {
      for (const auto& t : spec.types_)
        if (t.first == name) fail("duplicate type " + name);
      spec.types_.emplace_back(name, std::move(items));
    } else if (kind == "frame") {
      if (spec.frame(name)) fail("duplicate frame " + name);
      spec.frames_.push_back({name, "", std::move(items)});
    } else if (kind == "slot") {
      if (spec.slot(name)) fail("duplicate slot " + name);
      if (items.empty()) fail("slot " + name + " admits no filler type");
      spec.slots_.push_back({name, std::move(items)});
    } else {
      fail("unknown declaration '" + kind + "'");
    }
  }
  for (auto& frame : spec.frames_) {
    frame.type = frame.name;
    for (const auto& [type, members] : spec.types_) {
      if (std::find(members.begin(), members.end(), frame.name) == members.end()) continue;
      if (frame.type != frame.name)
        throw Error(ErrorCode::InvalidSpec, "frame " + frame.name + " belongs to two types");
      frame.type = type;
    }
  }
  spec.check();
  return spec;
}

InterlinguaSpec InterlinguaSpec::load(const std::string& path) { return parse(read_file(path)); }

void InterlinguaSpec::check() const {
  auto is_type = [this](std::string_view n) {
    return std::any_of(types_.begin(), types_.end(), [&](const auto& t) { return t.first == n; });
  };
  for (const auto& [type, members] : types_)
    for (const auto& m : members)
      if (!frame(m)) throw Error(ErrorCode::InvalidSpec, "type " + type + " lists undeclared frame " + m);
  for (const auto& f : frames_)
    for (const auto& s : f.slots)
      if (!slot(s)) throw Error(ErrorCode::InvalidSpec, "frame " + f.name + " uses undeclared slot " + s);
  for (const auto& s : slots_)
    for (const auto& a : s.allowed) {
      if (a == "@symbol" || a == "@number" || a == "@atom") continue;
      if (!frame(a) && !is_type(a))
        throw Error(ErrorCode::InvalidSpec, "slot " + s.name + " admits undeclared filler type " + a);
    }
}

std::string InterlinguaSpec::serialize() const {
  std::ostringstream os;
  for (const auto& [type, members] : types_) {
    os << "type " << type << " :";
    for (const auto& m : members) os << ' ' << m;
    os << '\n';
  }
  for (const auto& f : frames_) {
    os << "frame " << f.name << " :";
    for (const auto& s : f.slots) os << ' ' << s;
    os << '\n';
  }
  for (const auto& s : slots_) {
    os << "slot " << s.name << " :";
    for (const auto& a : s.allowed) os << ' ' << a;
    os << '\n';
  }
  return os.str();
}

const InterlinguaSpec::FrameDecl* InterlinguaSpec::frame(std::string_view name) const {
  for (const auto& f : frames_)
    if (f.name == name) return &f;
  return nullptr;
}

const InterlinguaSpec::SlotDecl* InterlinguaSpec::slot(std::string_view name) const {
  for (const auto& s : slots_)
    if (s.name == name) return &s;
  return nullptr;
}

std::string InterlinguaSpec::type_of(std::string_view frame_name) const {
  if (const auto* f = frame(frame_name)) return f->type;
  return std::string(frame_name);
}

std::vector<std::string> InterlinguaSpec::type_tags() const {
  std::vector<std::string> tags;
  for (const auto& [type, members] : types_) tags.push_back(type);
  for (const auto& f : frames_)
    if (f.type == f.name) tags.push_back(f.name);
  tags.emplace_back(kAtomType);
  return tags;
}

bool InterlinguaSpec::frame_has_slot(std::string_view frame_name, std::string_view slot_name) const {
  const auto* f = frame(frame_name);
  return f && std::find(f->slots.begin(), f->slots.end(), slot_name) != f->slots.end();
}

bool InterlinguaSpec::admits_frame(std::string_view slot_name, std::string_view frame_name) const {
  const auto* s = slot(slot_name);
  const auto* f = frame(frame_name);
  if (!s || !f) return false;
  return std::any_of(s->allowed.begin(), s->allowed.end(),
                     [&](const std::string& a) { return a == f->name || a == f->type; });
}

bool InterlinguaSpec::admits_atom(std::string_view slot_name, const Atom& atom) const {
  const auto* s = slot(slot_name);
  if (!s) return false;
  return std::any_of(s->allowed.begin(), s->allowed.end(), [&](const std::string& a) {
    return a == "@atom" || (a == "@symbol" && atom.kind == Atom::Kind::Symbol) ||
           (a == "@number" && atom.kind == Atom::Kind::Number);
  });
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void validate_into(const FeatureStructure& fs, const InterlinguaSpec& spec, const std::string& path,
                   std::vector<Violation>& out) {
  auto at = [&](const std::string& slot) { return path.empty() ? slot : path + "." + slot; };
  if (!spec.frame(fs.frame())) {
    out.push_back({path, "undeclared frame " + fs.frame()});
    return;
  }
  for (const auto& [slot, filler] : fs.slots()) {
    const std::string here = at(slot);
    if (!spec.frame_has_slot(fs.frame(), slot)) {
      out.push_back({here, "slot " + slot + " is not declared for frame " + fs.frame()});
      continue;
    }
    if (filler.is_atom()) {
      if (!spec.admits_atom(slot, filler.atom()))
        out.push_back({here, "slot " + slot + " does not admit atom " + filler.atom().text});
    } else if (filler.is_structure()) {
      const auto& child = *filler.structure();
      if (!spec.admits_frame(slot, child.frame()))
        out.push_back({here, "slot " + slot + " does not admit frame " + child.frame()});
      validate_into(child, spec, here, out);
    } else {
      const auto& elems = filler.multiple();
      if (elems.size() < 2) out.push_back({here, "*MULTIPLE* with fewer than two elements"});
      for (std::size_t i = 0; i < elems.size(); ++i) {
        const std::string elem_path = here + "[" + std::to_string(i) + "]";
        if (!spec.admits_frame(slot, elems[i]->frame()))
          out.push_back({elem_path, "slot " + slot + " does not admit frame " + elems[i]->frame()});
        validate_into(*elems[i], spec, elem_path, out);
      }
    }
  }
}

}  // namespace

std::vector<Violation> validate(const FeatureStructure& fs, const InterlinguaSpec& spec) {
  std::vector<Violation> out;
  validate_into(fs, spec, "", out);
  return out;
}

std::optional<InsertResult> insert(const FeatureStructure& parent, const FsPtr& child,
                                   const InterlinguaSpec& spec, const SlotScorer* scorer) {
  const auto* decl = spec.frame(parent.frame());
  if (!decl) return std::nullopt;
  const std::string child_type = spec.type_of(child->frame());

  struct Candidate {
    const std::string* slot;
    bool occupied;
    double score;
    std::size_t order;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < decl->slots.size(); ++i) {
    const std::string& slot = decl->slots[i];
    if (!spec.admits_frame(slot, child->frame())) continue;
    const Filler* existing = parent.find(slot);
    if (existing && existing->is_atom()) continue;
    double score = 0.0;
    if (scorer) score = scorer->score(slot, child_type).value_or(0.0);
    candidates.push_back({&slot, existing != nullptr, score, i});
  }
  if (candidates.empty()) return std::nullopt;
  auto best = std::min_element(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.occupied != b.occupied) return !a.occupied;
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });

  auto result = std::make_shared<FeatureStructure>(parent);
  const Filler* existing = parent.find(*best->slot);
  if (!existing) {
    result->set(*best->slot, child);
  } else if (existing->is_structure()) {
    result->set(*best->slot, Filler{Filler::Multiple{existing->structure(), child}});
  } else {
    Filler::Multiple elems = existing->multiple();
    elems.push_back(child);
    result->set(*best->slot, Filler{std::move(elems)});
  }
  return InsertResult{std::move(result), *best->slot};
}

namespace {

std::optional<FsPtr> merge_rec(const FsPtr& a, const FsPtr& b) {
  if (a->frame() != b->frame()) return std::nullopt;
  if (*a == *b) return a;
  auto out = std::make_shared<FeatureStructure>(a->frame(), a->synthetic() && b->synthetic());
  for (const auto& [slot, filler] : a->slots()) out->set(slot, filler);
  for (const auto& [slot, fb] : b->slots()) {
    const Filler* fa = a->find(slot);
    if (!fa) {
      out->set(slot, fb);
      continue;
    }
    if (*fa == fb) continue;
    if (fa->is_structure() && fb.is_structure()) {
      auto sub = merge_rec(fa->structure(), fb.structure());
      if (!sub) return std::nullopt;
      out->set(slot, *sub);
      continue;
    }
    return std::nullopt;
  }
  return FsPtr(std::move(out));
}

}  // namespace

std::optional<FsPtr> merge(const FsPtr& a, const FsPtr& b, const InterlinguaSpec& spec) {
  auto merged = merge_rec(a, b);
  if (!merged || !is_valid(**merged, spec)) return std::nullopt;
  return merged;
}

std::size_t size(const FeatureStructure& fs) {
  std::size_t n = 1;
  for (const auto& [slot, filler] : fs.slots()) {
    if (filler.is_atom()) {
      ++n;
    } else if (filler.is_structure()) {
      n += size(*filler.structure());
    } else {
      for (const auto& e : filler.multiple()) n += size(*e);
    }
  }
  return n;
}

namespace {

void collect_facts(const FeatureStructure& fs, std::vector<std::string>& out) {
  if (!fs.synthetic()) out.push_back("frame " + fs.frame());
  const std::string prefix = fs.frame() + " " ;
  for (const auto& [slot, filler] : fs.slots()) {
    if (filler.is_atom()) {
      out.push_back(prefix + slot + " = " + filler.atom().text);
    } else if (filler.is_structure()) {
      out.push_back(prefix + slot + " -> " + filler.structure()->frame());
      collect_facts(*filler.structure(), out);
    } else {
      for (const auto& e : filler.multiple()) {
        out.push_back(prefix + slot + " -> " + e->frame());
        collect_facts(*e, out);
      }
    }
  }
}

}  // namespace

std::vector<std::string> facts(const FeatureStructure& fs) {
  std::vector<std::string> out;
  collect_facts(fs, out);
  std::sort(out.begin(), out.end());
  return out;
}

Similarity similarity(const FeatureStructure& candidate, const FeatureStructure& gold) {
  const auto c = facts(candidate);
  const auto g = facts(gold);
  std::vector<std::string> common;
  std::set_intersection(c.begin(), c.end(), g.begin(), g.end(), std::back_inserter(common));
  Similarity s;
  const double hits = static_cast<double>(common.size());
  s.precision = c.empty() ? 0.0 : hits / static_cast<double>(c.size());
  s.recall = g.empty() ? 0.0 : hits / static_cast<double>(g.size());
  s.f1 = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

}  // namespace rose
