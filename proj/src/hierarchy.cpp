#include "nestdyn/hierarchy.hpp"

#include <algorithm>
#include <set>

namespace nestdyn {

ActionSet ActionSet::make(int n, std::vector<std::string> labels) {
  if (n < 1) throw InvalidState("action count must be >= 1");
  if (!labels.empty()) {
    if (static_cast<int>(labels.size()) != n)
      throw InvalidState("labels must have one entry per action");
    std::set<std::string> seen(labels.begin(), labels.end());
    if (static_cast<int>(seen.size()) != n)
      throw InvalidState("labels must be distinct");
  }
  return ActionSet{n, std::move(labels)};
}

namespace {

// Validates that `classes` is a partition of 0..n-1 and returns it with each
// class sorted and classes ordered by their smallest member.
std::vector<std::vector<int>> normalize_partition(int n,
                                                  std::vector<std::vector<int>> classes) {
  std::vector<int> owner(n, -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].empty()) throw EmptyClass("empty class in partition");
    std::sort(classes[c].begin(), classes[c].end());
    for (int a : classes[c]) {
      if (a < 0 || a >= n)
        throw NotAPartition("action index " + std::to_string(a) + " out of range");
      if (owner[a] != -1)
        throw NotAPartition("action " + std::to_string(a) + " appears in two classes");
      owner[a] = static_cast<int>(c);
    }
  }
  for (int a = 0; a < n; ++a)
    if (owner[a] == -1)
      throw NotAPartition("action " + std::to_string(a) + " missing from partition");
  std::sort(classes.begin(), classes.end(),
            [](const auto& u, const auto& v) { return u.front() < v.front(); });
  return classes;
}

bool is_trivial_level(int n, const std::vector<std::vector<int>>& classes) {
  return classes.size() == 1 && static_cast<int>(classes[0].size()) == n;
}

bool is_singleton_level(int n, const std::vector<std::vector<int>>& classes) {
  if (static_cast<int>(classes.size()) != n) return false;
  return std::all_of(classes.begin(), classes.end(),
                     [](const auto& c) { return c.size() == 1; });
}

}  // namespace

SimilarityTree SimilarityTree::build(
    int n, const std::vector<std::vector<std::vector<int>>>& levels) {
  if (n < 1) throw InvalidState("action count must be >= 1");

  // Strip an explicitly supplied trivial level / singleton level; both are
  // always rematerialized below so the two accepted input forms coincide.
  std::vector<std::vector<std::vector<int>>> interior;
  for (const auto& level : levels) {
    auto classes = normalize_partition(n, level);
    if (is_trivial_level(n, classes) || is_singleton_level(n, classes)) continue;
    interior.push_back(std::move(classes));
  }

  SimilarityTree tree;
  tree.n_ = n;
  tree.depth_ = static_cast<int>(interior.size()) + 1;

  tree.members_.resize(tree.depth_ + 1);
  std::vector<int> all(n);
  for (int a = 0; a < n; ++a) all[a] = a;
  tree.members_[0] = {all};
  for (int l = 1; l < tree.depth_; ++l) tree.members_[l] = std::move(interior[l - 1]);
  tree.members_[tree.depth_].resize(n);
  for (int a = 0; a < n; ++a) tree.members_[tree.depth_][a] = {a};

  tree.class_of_.assign(n, std::vector<int>(tree.depth_ + 1, 0));
  for (int l = 0; l <= tree.depth_; ++l)
    for (std::size_t c = 0; c < tree.members_[l].size(); ++c)
      for (int a : tree.members_[l][c]) tree.class_of_[a][l] = static_cast<int>(c);

  tree.parent_.resize(tree.depth_ + 1);
  for (int l = 1; l <= tree.depth_; ++l) {
    tree.parent_[l].resize(tree.members_[l].size());
    for (std::size_t c = 0; c < tree.members_[l].size(); ++c) {
      const auto& cls = tree.members_[l][c];
      int p = tree.class_of_[cls.front()][l - 1];
      for (int a : cls)
        if (tree.class_of_[a][l - 1] != p)
          throw NotNested("class at level " + std::to_string(l) +
                          " straddles two classes of level " + std::to_string(l - 1));
      tree.parent_[l][c] = p;
    }
  }
  return tree;
}

int SimilarityTree::num_classes(int level) const {
  if (level < 0 || level > depth_) throw LevelOutOfRange("level " + std::to_string(level));
  return static_cast<int>(members_[level].size());
}

ClassId SimilarityTree::ancestor(int action, int level) const {
  if (action < 0 || action >= n_)
    throw InvalidState("action index " + std::to_string(action) + " out of range");
  if (level < 0 || level > depth_)
    throw LevelOutOfRange("level " + std::to_string(level));
  return {level, class_of_[action][level]};
}

int SimilarityTree::degree(int a, int b) const {
  if (a < 0 || a >= n_ || b < 0 || b >= n_)
    throw InvalidState("action index out of range");
  int deg = 0;
  for (int l = 1; l <= depth_ - 1; ++l) {
    if (class_of_[a][l] != class_of_[b][l]) break;
    deg = l;
  }
  if (a == b) deg = depth_ - 1;
  return deg;
}

void SimilarityTree::check_class(ClassId c) const {
  if (c.level < 0 || c.level > depth_ || c.index < 0 ||
      c.index >= static_cast<int>(members_[c.level].size()))
    throw InvalidClass("no class with level " + std::to_string(c.level) + ", index " +
                       std::to_string(c.index));
}

const std::vector<int>& SimilarityTree::class_members(ClassId c) const {
  check_class(c);
  return members_[c.level][c.index];
}

ClassId SimilarityTree::parent(ClassId c) const {
  check_class(c);
  if (c.level == 0) throw InvalidClass("root has no parent");
  return {c.level - 1, parent_[c.level][c.index]};
}

std::vector<ClassId> SimilarityTree::lineage(ClassId c) const {
  check_class(c);
  std::vector<ClassId> chain(c.level + 1);
  chain[c.level] = c;
  for (int l = c.level; l > 0; --l) chain[l - 1] = parent(chain[l]);
  return chain;
}

const std::vector<int>& SimilarityTree::class_index_of(int action) const {
  if (action < 0 || action >= n_)
    throw InvalidState("action index " + std::to_string(action) + " out of range");
  return class_of_[action];
}

const std::vector<std::vector<int>>& SimilarityTree::partition(int level) const {
  if (level < 0 || level > depth_) throw LevelOutOfRange("level " + std::to_string(level));
  return members_[level];
}

}  // namespace nestdyn
