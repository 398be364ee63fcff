// foml :: bundled-fragment classification

#ifndef FOML_FRAGMENT_HPP_
#define FOML_FRAGMENT_HPP_

#include <set>
#include <string>

#include "formula.hpp"

namespace foml {

// Named by the positive form; duals count as the same bundle
// (e.g. `forall x <>` is ExistsBox, `<> forall x` is BoxExists).
enum class Bundle { ForallBox, ExistsBox, BoxForall, BoxExists };

enum class FragmentCategory { FmpDecidable, Undecidable, EBBE, NotBundled };

struct FragmentClass {
  std::set<Bundle> bundles_present;
  FragmentCategory category = FragmentCategory::NotBundled;

  friend bool operator==(const FragmentClass&, const FragmentClass&) = default;
};

// Category of a bundle combination over increasing-domain models.
FragmentCategory categorize(const std::set<Bundle>& bundles);

// Works on the NNF of f. Every quantifier must be bundled with an adjacent modality that no
// other quantifier uses; among the bundle sets admitting such a matching the best category
// wins (EBBE, then FMP-decidable, then undecidable), then the smallest set.
FragmentClass classify_fragment(const Formula& f);

std::string to_string(Bundle b);
std::string to_string(FragmentCategory c);

} // namespace foml

#endif // FOML_FRAGMENT_HPP_
