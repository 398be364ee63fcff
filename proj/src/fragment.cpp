#include "foml/fragment.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "foml/syntax.hpp"

namespace foml {

namespace {

struct QuantSlot {
  std::vector<std::pair<std::size_t, Bundle>> options; // (modality id, bundle)
};

Bundle quant_then_modal(Op q, Op m) {
  bool uni = q == Op::Forall, box = m == Op::Box;
  // forall-box / exists-diamond, exists-box / forall-diamond
  return uni == box ? Bundle::ForallBox : Bundle::ExistsBox;
}

Bundle modal_then_quant(Op m, Op q) {
  bool uni = q == Op::Forall, box = m == Op::Box;
  // box-forall / diamond-exists, box-exists / diamond-forall
  return uni == box ? Bundle::BoxForall : Bundle::BoxExists;
}

struct Collector {
  std::size_t next_modal = 0;
  std::vector<QuantSlot> quants;

  void walk(const Formula& f, const Formula* parent, std::size_t parent_modal) {
    switch (f.op()) {
      case Op::Pred: return;
      case Op::Not: case Op::And: case Op::Or: case Op::Implies: case Op::Iff:
        walk(f.lhs(), &f, 0);
        if (f.is_binary()) walk(f.rhs(), &f, 0);
        return;
      case Op::Box: case Op::Diamond: {
        std::size_t id = next_modal++;
        walk(f.body(), &f, id);
        return;
      }
      case Op::Exists: case Op::Forall: {
        QuantSlot slot;
        if (parent && parent->is_modal()) slot.options.emplace_back(parent_modal, modal_then_quant(parent->op(), f.op()));
        std::size_t idx = quants.size();
        quants.push_back(slot);
        Formula body = f.body();
        if (body.is_modal()) {
          quants[idx].options.emplace_back(next_modal, quant_then_modal(f.op(), body.op()));
        }
        walk(body, &f, 0);
        return;
      }
    }
  }
};

bool match(const std::vector<QuantSlot>& qs, std::size_t i, const std::set<Bundle>& allowed,
           std::vector<bool>& used) {
  if (i == qs.size()) return true;
  for (const auto& [m, b] : qs[i].options) {
    if (!allowed.contains(b) || used[m]) continue;
    used[m] = true;
    if (match(qs, i + 1, allowed, used)) return true;
    used[m] = false;
  }
  return false;
}

int rank(FragmentCategory c) {
  switch (c) {
    case FragmentCategory::EBBE: return 0;
    case FragmentCategory::FmpDecidable: return 1;
    case FragmentCategory::Undecidable: return 2;
    default: return 3;
  }
}

} // namespace

FragmentCategory categorize(const std::set<Bundle>& bs) {
  auto within = [&](std::initializer_list<Bundle> allowed) {
    return std::all_of(bs.begin(), bs.end(), [&](Bundle b) {
      return std::find(allowed.begin(), allowed.end(), b) != allowed.end();
    });
  };
  if (within({Bundle::ExistsBox, Bundle::BoxExists})) return FragmentCategory::EBBE;
  if (within({Bundle::ForallBox, Bundle::ExistsBox}) || within({Bundle::ForallBox, Bundle::BoxForall, Bundle::BoxExists})) {
    return FragmentCategory::FmpDecidable;
  }
  return FragmentCategory::Undecidable;
}

FragmentClass classify_fragment(const Formula& f) {
  Collector c;
  c.walk(to_nnf(f), nullptr, 0);
  const Bundle all[] = {Bundle::ForallBox, Bundle::ExistsBox, Bundle::BoxForall, Bundle::BoxExists};
  std::vector<std::set<Bundle>> masks;
  for (unsigned m = 0; m < 16; ++m) {
    std::set<Bundle> s;
    for (unsigned i = 0; i < 4; ++i) {
      if (m & (1u << i)) s.insert(all[i]);
    }
    masks.push_back(std::move(s));
  }
  std::stable_sort(masks.begin(), masks.end(), [](const auto& a, const auto& b) {
    int ra = rank(categorize(a)), rb = rank(categorize(b));
    if (ra != rb) return ra < rb;
    return a.size() < b.size();
  });
  for (const auto& m : masks) {
    std::vector<bool> used(c.next_modal, false);
    if (match(c.quants, 0, m, used)) return FragmentClass{m, categorize(m)};
  }
  return FragmentClass{{}, FragmentCategory::NotBundled};
}

std::string to_string(Bundle b) {
  switch (b) {
    case Bundle::ForallBox: return "forall-box";
    case Bundle::ExistsBox: return "exists-box";
    case Bundle::BoxForall: return "box-forall";
    case Bundle::BoxExists: return "box-exists";
  }
  return "?";
}

std::string to_string(FragmentCategory c) {
  switch (c) {
    case FragmentCategory::FmpDecidable: return "FMP-decidable";
    case FragmentCategory::Undecidable: return "Undecidable";
    case FragmentCategory::EBBE: return "EBBE";
    case FragmentCategory::NotBundled: return "NotBundled";
  }
  return "?";
}

} // namespace foml
