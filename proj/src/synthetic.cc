#include "crossfire/synthetic.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <random>

#include "crossfire/canonicalize.h"
#include "crossfire/error.h"
#include "crossfire/hash.h"
#include "crossfire/report.h"
#include "json_codec.h"

namespace crossfire {

using internal::Json;

namespace {

// Portable draws: std::uniform_*_distribution output differs between
// standard libraries, and corpora must be the same everywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t Below(uint64_t n) {
    if (n <= 1) return 0;
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = max - max % n;
    uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return r % n;
  }
  int Between(int lo, int hi) {
    return lo + static_cast<int>(Below(static_cast<uint64_t>(hi - lo + 1)));
  }
  bool Chance(double p) {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53 < p;
  }
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[Below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

std::string Padded(std::string_view prefix, int n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<size_t>(width) - digits.size(), '0');
  }
  return std::string(prefix) + digits;
}

void SortSlots(HeapObject& o) {
  std::sort(o.slots.begin(), o.slots.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
}

const TestHeap& HeapFor(const ScenarioPlan& plan, const std::string& test_id) {
  for (const TestHeap& h : plan.heaps) {
    if (h.test_id == test_id) return h;
  }
  throw ConfigError("plan has no heap for test '" + test_id + "'");
}

// Structural facts about one heap that planting rules depend on.
struct HeapFacts {
  std::vector<int> in_degree;
  std::vector<char> is_root;
  std::vector<char> tainted;  // reachable from a size-varying collection

  explicit HeapFacts(const TestHeap& heap);
};

std::vector<int> Reach(const TestHeap& heap, int from) {
  std::vector<char> seen(heap.objects.size(), 0);
  std::vector<int> out{from};
  seen[from] = 1;
  for (size_t i = 0; i < out.size(); ++i) {
    for (const auto& [label, slot] : heap.objects[out[i]].slots) {
      if (slot.kind == HeapSlot::Kind::kRef && !seen[slot.target]) {
        seen[slot.target] = 1;
        out.push_back(slot.target);
      }
    }
  }
  return out;
}

HeapFacts::HeapFacts(const TestHeap& heap)
    : in_degree(heap.objects.size(), 0),
      is_root(heap.objects.size(), 0),
      tainted(heap.objects.size(), 0) {
  for (const HeapObject& o : heap.objects) {
    for (const auto& [label, slot] : o.slots) {
      if (slot.kind == HeapSlot::Kind::kRef) ++in_degree[slot.target];
    }
  }
  for (const HeapVariable& v : heap.variables) is_root[v.object] = 1;
  for (size_t i = 0; i < heap.objects.size(); ++i) {
    if (!heap.objects[i].size_varies) continue;
    for (const int o : Reach(heap, static_cast<int>(i))) tainted[o] = 1;
  }
}

// The subtree under `target` is a private tree: nothing else points into it
// and it points nowhere else. Removing or retyping it cannot move ownership
// of any other node during canonicalization.
bool SelfContained(const TestHeap& heap, const HeapFacts& facts, int target) {
  const std::vector<int> reach = Reach(heap, target);
  std::vector<char> inside(heap.objects.size(), 0);
  for (const int o : reach) inside[o] = 1;
  for (const int o : reach) {
    if (facts.in_degree[o] != 1 || facts.is_root[o]) return false;
    for (const auto& [label, slot] : heap.objects[o].slots) {
      if (slot.kind == HeapSlot::Kind::kRef && !inside[slot.target]) return false;
    }
  }
  return true;
}

bool IsStructural(PlantingKind k) { return k != PlantingKind::kValue; }

std::string_view PlantingKindName(PlantingKind k) {
  switch (k) {
    case PlantingKind::kValue:
      return "value";
    case PlantingKind::kNullness:
      return "nullness";
    case PlantingKind::kCollectionSize:
      return "collection-size";
    case PlantingKind::kType:
      return "type";
  }
  return "?";
}

std::string LabelText(const EdgeLabel& l) {
  return l.is_field() ? "." + l.field() : "[" + std::to_string(l.index()) + "]";
}

std::string Where(const Planting& p) {
  return std::string(PlantingKindName(p.kind)) + " planting of " + p.mutant_id +
         " at " + p.test_id + " o" + std::to_string(p.object) + LabelText(p.label);
}

// Whether a planting touches a nondeterministic site.
bool TouchesNondeterminism(const TestHeap& heap, const HeapFacts& facts,
                           const Planting& p) {
  if (facts.tainted[p.object]) return true;
  const HeapSlot* slot = heap.objects[p.object].FindSlot(p.label);
  if (slot == nullptr) return false;
  if (p.kind == PlantingKind::kValue) return slot->nondeterministic;
  return slot->kind == HeapSlot::Kind::kRef && facts.tainted[slot->target];
}

// Returns an error message, or empty if `p` is applicable to its heap.
std::string CheckApplicable(const TestHeap& heap, const HeapFacts& facts,
                            const Planting& p) {
  if (p.object < 0 || p.object >= static_cast<int>(heap.objects.size())) {
    return "no such object";
  }
  const HeapObject& parent = heap.objects[p.object];
  const HeapSlot* slot = parent.FindSlot(p.label);
  if (slot == nullptr) return "no such slot";
  switch (p.kind) {
    case PlantingKind::kValue:
      if (slot->kind != HeapSlot::Kind::kPrimitive) return "slot is not a primitive";
      if (!slot->nondeterministic && slot->value == p.value) {
        return "planted value equals the original";
      }
      return "";
    case PlantingKind::kNullness:
      if (slot->kind != HeapSlot::Kind::kRef) return "slot does not hold a reference";
      break;
    case PlantingKind::kCollectionSize: {
      if (slot->kind != HeapSlot::Kind::kRef ||
          !heap.objects[slot->target].collection) {
        return "slot does not hold a collection";
      }
      const HeapObject& c = heap.objects[slot->target];
      if (p.size_delta == -1) {
        if (c.slots.empty()) return "cannot shrink an empty collection";
        if (c.slots.back().second.kind == HeapSlot::Kind::kRef) {
          return "last element is a reference";
        }
      } else if (p.size_delta != 1) {
        return "size_delta must be +1 or -1";
      }
      break;
    }
    case PlantingKind::kType:
      if (slot->kind != HeapSlot::Kind::kRef) return "slot does not hold a reference";
      if (p.value.empty() || p.value == heap.objects[slot->target].type_name) {
        return "new type name must differ from the original";
      }
      break;
  }
  if (!SelfContained(heap, facts, slot->target)) {
    return "its subtree is shared with the rest of the heap";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Realization.

struct Realization {
  std::string tag;  // distinguishes runs and mutants in nondeterministic values
  int extra_elements = 0;
};

TestHeap Realized(const TestHeap& base, uint64_t seed, const Realization& r,
                  const std::vector<const Planting*>& plantings) {
  TestHeap heap = base;
  for (const Planting* p : plantings) {
    HeapObject& parent = heap.objects[p->object];
    HeapSlot& slot = *parent.FindSlot(p->label);
    switch (p->kind) {
      case PlantingKind::kValue:
        break;  // applied after nondeterministic values
      case PlantingKind::kNullness:
        slot.type_name = heap.objects[slot.target].type_name;
        slot.kind = HeapSlot::Kind::kNull;
        slot.target = -1;
        break;
      case PlantingKind::kCollectionSize: {
        HeapObject& c = heap.objects[slot.target];
        if (p->size_delta < 0) {
          c.slots.pop_back();
        } else {
          HeapSlot added;
          added.type_name = "int";
          added.value = "planted";
          c.slots.emplace_back(EdgeLabel::Index(static_cast<int64_t>(c.slots.size())),
                               added);
        }
        break;
      }
      case PlantingKind::kType:
        heap.objects[slot.target].type_name = p->value;
        break;
    }
  }
  for (size_t i = 0; i < heap.objects.size(); ++i) {
    HeapObject& o = heap.objects[i];
    for (auto& [label, slot] : o.slots) {
      if (!slot.nondeterministic) continue;
      const std::string key = base.test_id + "\x1f" + std::to_string(i) + "\x1f" +
                              LabelText(label) + "\x1f" + r.tag;
      slot.value = "h" + HashToHex(Fnv1a64(key, seed ^ kFnvOffsetBasis));
    }
    if (o.size_varies) {
      for (int k = 0; k < r.extra_elements; ++k) {
        HeapSlot extra;
        extra.type_name = "int";
        extra.value = "e" + std::to_string(k);
        o.slots.emplace_back(EdgeLabel::Index(static_cast<int64_t>(o.slots.size())),
                             extra);
      }
    }
  }
  for (const Planting* p : plantings) {
    if (p->kind == PlantingKind::kValue) {
      heap.objects[p->object].FindSlot(p->label)->value = p->value;
    }
  }
  return heap;
}

VariableGraph RawGraph(const TestHeap& heap, const HeapVariable& v) {
  VariableGraph g;
  g.variable = v.variable;
  const auto obj_id = [](int o) { return "o" + std::to_string(o); };
  g.root = obj_id(v.object);
  for (const int o : Reach(heap, v.object)) {
    const HeapObject& obj = heap.objects[o];
    GraphNode n;
    n.id = obj_id(o);
    n.kind = obj.collection ? NodeKind::kCollection : NodeKind::kObject;
    n.type_name = obj.type_name;
    if (obj.collection) n.size = static_cast<int64_t>(obj.slots.size());
    g.nodes.push_back(std::move(n));
    for (size_t k = 0; k < obj.slots.size(); ++k) {
      const auto& [label, slot] = obj.slots[k];
      std::string child;
      if (slot.kind == HeapSlot::Kind::kRef) {
        child = obj_id(slot.target);
      } else {
        child = obj_id(o) + ":" + std::to_string(k);
        GraphNode leaf;
        leaf.id = child;
        leaf.type_name = slot.type_name;
        if (slot.kind == HeapSlot::Kind::kPrimitive) {
          leaf.kind = NodeKind::kPrimitive;
          leaf.value = slot.value;
        } else {
          leaf.kind = NodeKind::kNull;
        }
        g.nodes.push_back(std::move(leaf));
      }
      g.edges.push_back({obj_id(o), label, child});
    }
  }
  return g;
}

TestRunSnapshot Snapshot(const TestHeap& heap, std::string version, int64_t run) {
  TestRunSnapshot s;
  s.program_version = std::move(version);
  s.run_index = run;
  s.test_id = heap.test_id;
  for (const HeapVariable& v : heap.variables) {
    s.variables.push_back(Canonicalize(RawGraph(heap, v)));
  }
  SortVariables(&s);
  return s;
}

// ---------------------------------------------------------------------------
// Random heaps.

class HeapBuilder {
 public:
  HeapBuilder(const ScenarioSpec& spec, Rng& rng, TestHeap& heap)
      : spec_(spec), rng_(rng), heap_(heap) {}

  int NewObject(int depth) {
    const int index = Add(false, "T" + std::to_string(rng_.Below(6)));
    const int n_fields = rng_.Between(1, spec_.max_fanout);
    std::vector<int> names(12);
    for (int i = 0; i < 12; ++i) names[i] = i;
    rng_.Shuffle(names);
    for (int f = 0; f < n_fields; ++f) {
      EdgeLabel label = EdgeLabel::Field("f" + std::to_string(names[f]));
      HeapSlot slot;
      if (depth + 1 <= spec_.max_depth) {
        const uint64_t r = rng_.Below(100);
        if (r < 50) {
          slot = Primitive();
        } else if (r < 62) {
          slot = Null();
        } else if (r < 85) {
          slot = Ref(NewObject(depth + 1));
        } else {
          slot = Ref(NewCollection(depth + 1));
        }
      } else {
        slot = rng_.Chance(0.85) ? Primitive() : Null();
      }
      heap_.objects[index].slots.emplace_back(std::move(label), std::move(slot));
    }
    SortSlots(heap_.objects[index]);
    return index;
  }

  int NewCollection(int depth) {
    const int index = Add(true, rng_.Chance(0.5) ? "ArrayList" : "LinkedList");
    const int n = rng_.Between(0, spec_.max_collection);
    for (int i = 0; i < n; ++i) {
      HeapSlot slot = depth + 1 <= spec_.max_depth && rng_.Chance(0.3)
                          ? Ref(NewObject(depth + 1))
                          : Primitive();
      heap_.objects[index].slots.emplace_back(EdgeLabel::Index(i), std::move(slot));
    }
    return index;
  }

  HeapSlot Primitive() {
    HeapSlot s;
    if (rng_.Chance(0.5)) {
      s.type_name = "int";
      s.value = std::to_string(rng_.Below(1000));
    } else {
      s.type_name = "String";
      s.value = "s" + std::to_string(rng_.Below(1000));
    }
    return s;
  }

  HeapSlot Null() {
    HeapSlot s;
    s.kind = HeapSlot::Kind::kNull;
    s.type_name = "T" + std::to_string(rng_.Below(6));
    return s;
  }

  static HeapSlot Ref(int target) {
    HeapSlot s;
    s.kind = HeapSlot::Kind::kRef;
    s.target = target;
    return s;
  }

 private:
  int Add(bool collection, std::string type) {
    HeapObject o;
    o.collection = collection;
    o.type_name = std::move(type);
    heap_.objects.push_back(std::move(o));
    return static_cast<int>(heap_.objects.size()) - 1;
  }

  const ScenarioSpec& spec_;
  Rng& rng_;
  TestHeap& heap_;
};

constexpr VariableKind kVariableKinds[] = {
    VariableKind::kLocal, VariableKind::kTestClassField, VariableKind::kMethodReturn,
    VariableKind::kInstantiatedObject, VariableKind::kStaticField};

TestHeap RandomHeap(const ScenarioSpec& spec, Rng& rng, std::string test_id) {
  TestHeap heap;
  heap.test_id = std::move(test_id);
  HeapBuilder builder(spec, rng, heap);
  const int n_vars = rng.Between(spec.min_variables, spec.max_variables);
  for (int v = 0; v < n_vars; ++v) {
    HeapVariable hv;
    hv.variable.name = "var" + std::to_string(v + 1);
    hv.variable.kind = kVariableKinds[rng.Below(5)];
    const double r = static_cast<double>(rng.Below(1u << 20)) / (1u << 20);
    if (v > 0 && r < spec.alias_rate) {
      hv.object = heap.variables[rng.Below(heap.variables.size())].object;
    } else if (v > 0 && r < spec.alias_rate + spec.subalias_rate) {
      const int existing = static_cast<int>(rng.Below(heap.objects.size()));
      hv.object = builder.NewObject(1);
      heap.objects[hv.object].slots.emplace_back(EdgeLabel::Field("link"),
                                                 HeapBuilder::Ref(existing));
      SortSlots(heap.objects[hv.object]);
    } else {
      hv.object = builder.NewObject(1);
    }
    heap.variables.push_back(std::move(hv));
  }
  for (HeapObject& o : heap.objects) {
    if (!o.collection && rng.Chance(spec.diamond_rate)) {
      o.slots.emplace_back(
          EdgeLabel::Field("back"),
          HeapBuilder::Ref(static_cast<int>(rng.Below(heap.objects.size()))));
      SortSlots(o);
    }
  }
  for (HeapObject& o : heap.objects) {
    for (auto& [label, slot] : o.slots) {
      if (slot.kind == HeapSlot::Kind::kPrimitive &&
          rng.Chance(spec.nondeterminism_rate)) {
        slot.nondeterministic = true;
      }
    }
    if (o.collection && rng.Chance(spec.nondeterminism_rate / 2)) o.size_varies = true;
  }
  return heap;
}

struct Site {
  int object;
  EdgeLabel label;
};

struct TestSites {
  std::vector<Site> value;       // deterministic primitive slots
  std::vector<Site> structural;  // self-contained reference slots
  std::vector<Site> masked;      // nondeterministic primitive slots
};

TestSites CollectSites(const TestHeap& heap, const ScenarioSpec& spec, Rng& rng) {
  const HeapFacts facts(heap);
  TestSites sites;
  for (size_t i = 0; i < heap.objects.size(); ++i) {
    const int o = static_cast<int>(i);
    for (const auto& [label, slot] : heap.objects[i].slots) {
      if (slot.kind == HeapSlot::Kind::kPrimitive) {
        if (slot.nondeterministic) {
          sites.masked.push_back({o, label});
        } else if (!facts.tainted[o]) {
          sites.value.push_back({o, label});
        }
      } else if (slot.kind == HeapSlot::Kind::kRef && !facts.tainted[o] &&
                 !facts.tainted[slot.target] &&
                 SelfContained(heap, facts, slot.target)) {
        sites.structural.push_back({o, label});
      }
    }
  }
  if (spec.site_pool > 0) {
    rng.Shuffle(sites.value);
    rng.Shuffle(sites.structural);
    const size_t pool = static_cast<size_t>(spec.site_pool);
    const size_t n_struct = std::min(sites.structural.size(), pool / 3);
    sites.structural.resize(n_struct);
    sites.value.resize(std::min(sites.value.size(), pool - n_struct));
  }
  return sites;
}

// Whether adding `p` to `existing` (same mutant and test) keeps the plan
// feasible under the subtree rule.
bool Compatible(const TestHeap& heap, const Planting& p,
                const std::vector<Planting>& existing) {
  auto below = [&](const Planting& structural, const Planting& other) {
    const int target = heap.objects[structural.object].FindSlot(structural.label)->target;
    const std::vector<int> reach = Reach(heap, target);
    return std::find(reach.begin(), reach.end(), other.object) != reach.end();
  };
  for (const Planting& q : existing) {
    if (q.object == p.object && q.label == p.label) return false;
    if (IsStructural(q.kind) && below(q, p)) return false;
    if (IsStructural(p.kind) && below(p, q)) return false;
  }
  return true;
}

}  // namespace

const HeapSlot* HeapObject::FindSlot(const EdgeLabel& label) const {
  for (const auto& [l, slot] : slots) {
    if (l == label) return &slot;
  }
  return nullptr;
}

HeapSlot* HeapObject::FindSlot(const EdgeLabel& label) {
  for (auto& [l, slot] : slots) {
    if (l == label) return &slot;
  }
  return nullptr;
}

void ValidateSpec(const ScenarioSpec& spec) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("scenario: ") + what);
  };
  require(spec.n_tests >= 1, "n_tests must be >= 1");
  require(spec.min_variables >= 1 && spec.min_variables <= spec.max_variables,
          "need 1 <= min_variables <= max_variables");
  require(spec.max_variables <= 16, "max_variables must be <= 16");
  require(spec.max_depth >= 1 && spec.max_depth <= 32, "max_depth must be in [1, 32]");
  require(spec.max_fanout >= 1 && spec.max_fanout <= 12, "max_fanout must be in [1, 12]");
  require(spec.max_collection >= 0, "max_collection must be >= 0");
  require(spec.n_mutants >= 0, "n_mutants must be >= 0");
  require(spec.max_plantings >= 1, "max_plantings must be >= 1");
  require(spec.max_covering_tests >= 1, "max_covering_tests must be >= 1");
  require(spec.site_pool >= 0, "site_pool must be >= 0");
  require(spec.n_runs >= 2, "n_runs must be >= 2");
  for (const double p : {spec.surviving_fraction, spec.infection_rate,
                         spec.nondeterminism_rate, spec.alias_rate,
                         spec.subalias_rate, spec.diamond_rate, spec.structural_rate}) {
    require(p >= 0.0 && p <= 1.0, "rates must lie in [0, 1]");
  }
  require(spec.alias_rate + spec.subalias_rate <= 1.0,
          "alias_rate + subalias_rate must be <= 1");
}

void CheckPlan(const ScenarioPlan& plan) {
  if (plan.heaps.size() != plan.manifest.tests.size()) {
    throw ConfigError("infeasible plan: one heap per manifest test is required");
  }
  for (size_t i = 0; i < plan.heaps.size(); ++i) {
    if (plan.heaps[i].test_id != plan.manifest.tests[i]) {
      throw ConfigError("infeasible plan: heap " + std::to_string(i) + " is for '" +
                        plan.heaps[i].test_id + "'");
    }
  }
  std::map<std::pair<std::string, std::string>, std::vector<const Planting*>> groups;
  for (const Planting& p : plan.plantings) {
    const MutantEntry* m = plan.manifest.FindMutant(p.mutant_id);
    if (m == nullptr || m->status != MutantStatus::kSurvived) {
      throw ConfigError("infeasible plan: " + Where(p) +
                        ": mutant is not a surviving mutant");
    }
    if (std::find(m->covering_tests.begin(), m->covering_tests.end(), p.test_id) ==
        m->covering_tests.end()) {
      throw ConfigError("infeasible plan: " + Where(p) +
                        ": test does not cover the mutant");
    }
    groups[{p.mutant_id, p.test_id}].push_back(&p);
  }
  for (const auto& [key, list] : groups) {
    const TestHeap& heap = HeapFor(plan, key.second);
    const HeapFacts facts(heap);
    for (const Planting* p : list) {
      const std::string problem = CheckApplicable(heap, facts, *p);
      if (!problem.empty()) {
        throw ConfigError("infeasible plan: " + Where(*p) + ": " + problem);
      }
      if (!plan.masked_infections && TouchesNondeterminism(heap, facts, *p)) {
        throw ConfigError("infeasible plan: " + Where(*p) +
                          ": site is nondeterministic and masked infections are off");
      }
    }
    for (const Planting* p : list) {
      if (!IsStructural(p->kind)) continue;
      const int target = heap.objects[p->object].FindSlot(p->label)->target;
      const std::vector<int> reach = Reach(heap, target);
      for (const Planting* q : list) {
        if (q == p) continue;
        if (q->object == p->object && q->label == p->label) {
          throw ConfigError("infeasible plan: " + Where(*q) + ": slot planted twice");
        }
        if (std::find(reach.begin(), reach.end(), q->object) != reach.end()) {
          throw ConfigError("infeasible plan: " + Where(*q) + " lies below " +
                            Where(*p) + "; halting would hide it");
        }
      }
    }
    for (size_t i = 0; i < list.size(); ++i) {
      for (size_t j = i + 1; j < list.size(); ++j) {
        if (list[i]->object == list[j]->object && list[i]->label == list[j]->label) {
          throw ConfigError("infeasible plan: " + Where(*list[j]) +
                            ": slot planted twice");
        }
      }
    }
  }
}

GroundTruth ComputeTruth(const ScenarioPlan& plan) {
  GroundTruth truth;
  std::map<std::string, std::vector<const Planting*>> by_test;
  for (const Planting& p : plan.plantings) by_test[p.test_id].push_back(&p);

  for (const auto& [test_id, list] : by_test) {
    const TestHeap& heap = HeapFor(plan, test_id);
    std::vector<int> hits(list.size(), 0);
    for (const HeapVariable& v : heap.variables) {
      // First-arrival BFS: owner path of every object, and whether that path
      // runs through a size-varying collection.
      struct Owner {
        std::string path;
        bool masked;
      };
      std::vector<std::optional<Owner>> owner(heap.objects.size());
      std::deque<int> queue{v.object};
      owner[v.object] = Owner{EscapePathSegment(v.variable.name),
                              heap.objects[v.object].size_varies};
      while (!queue.empty()) {
        const int o = queue.front();
        queue.pop_front();
        for (const auto& [label, slot] : heap.objects[o].slots) {
          if (slot.kind != HeapSlot::Kind::kRef || owner[slot.target]) continue;
          owner[slot.target] =
              Owner{ChildPath(owner[o]->path, label),
                    owner[o]->masked || heap.objects[slot.target].size_varies};
          queue.push_back(slot.target);
        }
      }
      for (size_t i = 0; i < list.size(); ++i) {
        const Planting& p = *list[i];
        if (!owner[p.object]) continue;
        const HeapSlot& slot = *heap.objects[p.object].FindSlot(p.label);
        bool masked = owner[p.object]->masked;
        if (p.kind == PlantingKind::kValue) {
          masked = masked || slot.nondeterministic;
        } else {
          masked = masked || heap.objects[slot.target].size_varies;
        }
        if (masked) continue;
        ++hits[i];
        InfectionRecord r;
        r.mutant_id = p.mutant_id;
        r.test_id = test_id;
        r.variable = v.variable;
        r.node_id = ChildPath(owner[p.object]->path, p.label);
        r.depth = PathDepth(r.node_id);
        switch (p.kind) {
          case PlantingKind::kValue:
            r.kind = DifferenceKind::kValue;
            r.expected = slot.value;
            r.observed = p.value;
            break;
          case PlantingKind::kNullness:
            r.kind = DifferenceKind::kNullness;
            r.expected = "non-null";
            r.observed = "null";
            break;
          case PlantingKind::kCollectionSize: {
            const int64_t n =
                static_cast<int64_t>(heap.objects[slot.target].slots.size());
            r.kind = DifferenceKind::kCollectionSize;
            r.expected = std::to_string(n);
            r.observed = std::to_string(n + p.size_delta);
            break;
          }
          case PlantingKind::kType: {
            const HeapObject& t = heap.objects[slot.target];
            const std::string kind = t.collection ? "collection:" : "object:";
            r.kind = DifferenceKind::kType;
            r.expected = kind + t.type_name;
            r.observed = kind + p.value;
            r.type_only = true;
            break;
          }
        }
        truth.killable.insert(r.mutant_id);
        truth.records.push_back(std::move(r));
      }
    }
    for (const int h : hits) truth.masked_plantings += h == 0;
  }
  SortRecords(&truth.records);
  return truth;
}

InMemoryCorpus Realize(const ScenarioPlan& plan) {
  InMemoryCorpus corpus(plan.manifest);
  for (const TestHeap& heap : plan.heaps) {
    for (int64_t run = 0; run < plan.manifest.n_runs; ++run) {
      Realization r{"run" + std::to_string(run), static_cast<int>(run % 2)};
      corpus.Add(Snapshot(Realized(heap, plan.seed, r, {}), std::string(kOriginalVersion),
                          run));
    }
  }
  std::map<std::pair<std::string, std::string>, std::vector<const Planting*>> planted;
  for (const Planting& p : plan.plantings) {
    planted[{p.mutant_id, p.test_id}].push_back(&p);
  }
  static const std::vector<const Planting*> kNone;
  for (const MutantEntry& m : plan.manifest.mutants) {
    if (m.status != MutantStatus::kSurvived) continue;
    for (const std::string& test : m.covering_tests) {
      const auto it = planted.find({m.mutant_id, test});
      const auto& list = it == planted.end() ? kNone : it->second;
      Realization r{"mutant:" + m.mutant_id,
                    1 + static_cast<int>(Fnv1a64(m.mutant_id) % 2)};
      corpus.Add(Snapshot(Realized(HeapFor(plan, test), plan.seed, r, list),
                          m.mutant_id, 0));
    }
  }
  return corpus;
}

ScenarioPlan PlanScenario(const ScenarioSpec& spec) {
  ValidateSpec(spec);
  Rng rng(spec.seed);
  ScenarioPlan plan;
  plan.seed = spec.seed;
  plan.masked_infections = spec.masked_infections;
  plan.manifest.n_runs = spec.n_runs;

  const int test_width = static_cast<int>(std::to_string(spec.n_tests).size());
  for (int t = 0; t < spec.n_tests; ++t) {
    plan.manifest.tests.push_back(Padded("Test", t + 1, test_width));
    plan.heaps.push_back(RandomHeap(spec, rng, plan.manifest.tests.back()));
  }
  std::vector<TestSites> sites;
  for (const TestHeap& heap : plan.heaps) sites.push_back(CollectSites(heap, spec, rng));

  const int mutant_width = static_cast<int>(std::to_string(spec.n_mutants).size());
  for (int i = 0; i < spec.n_mutants; ++i) {
    MutantEntry m;
    m.mutant_id = Padded("m", i + 1, mutant_width);
    m.location = "Subject.java:" + std::to_string(10 + rng.Below(500));
    m.mutation_operator = rng.Chance(0.5) ? "ROR" : "AOR";
    m.status = rng.Chance(spec.surviving_fraction) ? MutantStatus::kSurvived
                                                   : MutantStatus::kKilled;
    std::vector<int> order(spec.n_tests);
    for (int t = 0; t < spec.n_tests; ++t) order[t] = t;
    rng.Shuffle(order);
    const int n_cover = rng.Between(1, std::min(spec.max_covering_tests, spec.n_tests));
    order.resize(n_cover);
    std::sort(order.begin(), order.end());
    for (const int t : order) m.covering_tests.push_back(plan.manifest.tests[t]);

    if (m.status == MutantStatus::kSurvived && rng.Chance(spec.infection_rate)) {
      std::map<int, std::vector<Planting>> per_test;
      const int n_plant = rng.Between(1, spec.max_plantings);
      for (int k = 0; k < n_plant; ++k) {
        const int t = order[rng.Below(order.size())];
        const TestHeap& heap = plan.heaps[t];
        const TestSites& s = sites[t];
        Planting p;
        p.mutant_id = m.mutant_id;
        p.test_id = heap.test_id;
        if (spec.masked_infections && !s.masked.empty() && rng.Chance(0.25)) {
          const Site& site = s.masked[rng.Below(s.masked.size())];
          p.object = site.object;
          p.label = site.label;
          p.value = "mut-" + m.mutant_id;
        } else if (!s.structural.empty() &&
                   (s.value.empty() || rng.Chance(spec.structural_rate))) {
          const Site& site = s.structural[rng.Below(s.structural.size())];
          p.object = site.object;
          p.label = site.label;
          const HeapObject& target =
              heap.objects[heap.objects[site.object].FindSlot(site.label)->target];
          const uint64_t pick = rng.Below(target.collection ? 3 : 2);
          if (pick == 0) {
            p.kind = PlantingKind::kNullness;
          } else if (pick == 1) {
            p.kind = PlantingKind::kType;
            p.value = target.type_name + "$Mut";
          } else {
            p.kind = PlantingKind::kCollectionSize;
            const bool can_shrink =
                !target.slots.empty() &&
                target.slots.back().second.kind != HeapSlot::Kind::kRef;
            p.size_delta = can_shrink && rng.Chance(0.5) ? -1 : 1;
          }
        } else if (!s.value.empty()) {
          const Site& site = s.value[rng.Below(s.value.size())];
          p.object = site.object;
          p.label = site.label;
          p.value = "mut-" + m.mutant_id;
        } else {
          continue;
        }
        std::vector<Planting>& existing = per_test[t];
        if (Compatible(heap, p, existing)) existing.push_back(std::move(p));
      }
      for (auto& [t, list] : per_test) {
        for (Planting& p : list) plan.plantings.push_back(std::move(p));
      }
    }
    plan.manifest.mutants.push_back(std::move(m));
  }
  CheckPlan(plan);
  return plan;
}

GeneratedCorpus GenerateCorpus(const ScenarioSpec& spec) {
  GeneratedCorpus g;
  g.plan = PlanScenario(spec);
  g.truth = ComputeTruth(g.plan);
  g.corpus = Realize(g.plan);
  return g;
}

ScenarioPlan AccountExamplePlan() {
  ScenarioPlan plan;
  plan.seed = 2;
  plan.manifest.n_runs = 10;
  plan.manifest.tests = {"Test1", "Test2"};

  auto prim = [](std::string type, std::string value, bool nondet = false) {
    HeapSlot s;
    s.type_name = std::move(type);
    s.value = std::move(value);
    s.nondeterministic = nondet;
    return s;
  };
  auto field = [](const char* name) { return EdgeLabel::Field(name); };

  TestHeap t1;
  t1.test_id = "Test1";
  HeapObject var1;
  var1.type_name = "Account";
  var1.slots = {{field("f2"), prim("int", "100")},
                {field("f3"), prim("String", "open")},
                {field("f6"), prim("int", "0", true)}};
  HeapObject var2;
  var2.type_name = "Ledger";
  var2.slots = {{field("f4"), HeapBuilder::Ref(0)}, {field("f5"), prim("int", "3")}};
  t1.objects = {var1, var2};
  t1.variables = {{{"var1", VariableKind::kLocal, 0}, 0},
                  {{"var2", VariableKind::kLocal, 0}, 1}};

  TestHeap t2;
  t2.test_id = "Test2";
  HeapObject var3;
  var3.type_name = "Report";
  var3.slots = {{field("f7"), prim("String", "ok")}, {field("f8"), prim("int", "42")}};
  t2.objects = {var3};
  t2.variables = {{{"var3", VariableKind::kLocal, 0}, 0}};
  plan.heaps = {t1, t2};

  auto mutant = [](const char* id, MutantStatus status,
                   std::vector<std::string> tests) {
    MutantEntry m;
    m.mutant_id = id;
    m.location = "Account.java";
    m.mutation_operator = "AOR";
    m.status = status;
    m.covering_tests = std::move(tests);
    return m;
  };
  const auto S = MutantStatus::kSurvived;
  const auto K = MutantStatus::kKilled;
  plan.manifest.mutants = {
      mutant("m1", S, {"Test1"}),          mutant("m2", S, {"Test1", "Test2"}),
      mutant("m3", S, {"Test1", "Test2"}), mutant("m4", K, {"Test1"}),
      mutant("m5", K, {"Test1"}),          mutant("m6", K, {"Test2"}),
      mutant("m7", K, {"Test2"}),
  };

  auto value = [](const char* m, const char* test, const char* f, const char* v) {
    Planting p;
    p.mutant_id = m;
    p.test_id = test;
    p.object = 0;
    p.label = EdgeLabel::Field(f);
    p.value = v;
    return p;
  };
  plan.plantings = {
      value("m1", "Test1", "f2", "101"), value("m2", "Test1", "f2", "99"),
      value("m3", "Test1", "f3", "closed"), value("m2", "Test2", "f8", "41"),
      value("m3", "Test2", "f8", "0"),
  };
  CheckPlan(plan);
  return plan;
}

std::string AccountExampleKillsJsonl() {
  auto kill = [](const char* m, const char* t, std::optional<AssertionId> a) {
    KillRecord r;
    r.mutant_id = m;
    r.test_id = t;
    r.failure_kind = a ? FailureKind::kAssertion : FailureKind::kNonAssertion;
    r.assertion = std::move(a);
    return SerializeKillRecord(r) + "\n";
  };
  return kill("m4", "Test1", AssertionId{"Test1", 14, 1}) +
         kill("m5", "Test1", AssertionId{"Test1", 14, 1}) +
         kill("m6", "Test2", AssertionId{"Test2", 9, 0}) + kill("m7", "Test2", std::nullopt);
}

std::string AccountExampleInventoryJson() {
  Json list = Json::array();
  for (const AssertionId& a : {AssertionId{"Test1", 12, 0}, AssertionId{"Test1", 14, 1},
                               AssertionId{"Test2", 9, 0}}) {
    list.push_back(Json{{"test_id", a.test_id}, {"line", a.line}, {"ordinal", a.ordinal}});
  }
  return internal::Dump(Json{{"assertions", std::move(list)}}) + "\n";
}

std::string SerializeTruth(const GroundTruth& truth) {
  Json records = Json::array();
  const std::string lines = SerializeRecordsJsonl(truth.records);
  size_t start = 0;
  while (start < lines.size()) {
    const size_t end = lines.find('\n', start);
    records.push_back(internal::ParseJson(std::string_view(lines).substr(start, end - start)));
    start = end + 1;
  }
  Json j = Json::object();
  j["killable"] = truth.killable;
  j["masked_plantings"] = truth.masked_plantings;
  j["records"] = std::move(records);
  return internal::Dump(j);
}

GroundTruth ParseTruth(std::string_view bytes) {
  const Json j = internal::ParseJson(bytes);
  if (!j.is_object()) throw ValidationError("$", "expected an object");
  GroundTruth truth;
  const Json& killable = internal::Require(j, "killable", "$");
  if (!killable.is_array()) throw ValidationError("$.killable", "expected an array");
  for (const Json& k : killable) {
    if (!k.is_string()) throw ValidationError("$.killable", "expected strings");
    truth.killable.insert(k.get<std::string>());
  }
  truth.masked_plantings = internal::RequireInt(j, "masked_plantings", "$");
  const Json& records = internal::Require(j, "records", "$");
  if (!records.is_array()) throw ValidationError("$.records", "expected an array");
  std::string lines;
  for (const Json& r : records) lines += internal::Dump(r) + "\n";
  truth.records = ParseRecordsJsonl(lines);
  return truth;
}

void WriteGenerated(const GeneratedCorpus& generated, const std::filesystem::path& root) {
  WriteCorpus(generated.corpus, root);
  WriteFile(root / "truth.json", SerializeTruth(generated.truth) + "\n");
}

}  // namespace crossfire
