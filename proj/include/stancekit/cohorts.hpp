#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "stancekit/events.hpp"

namespace stancekit {

inline bool is_deleted_author(const std::string& author) {
  return author.empty() || author == "[deleted]" || author == "[removed]";
}

/// Stamps each event with its author's cohort: the year of the author's
/// first platform comment. When the supplied first-activity map lacks an
/// author (or none is given), the cohort falls back to the author's earliest
/// year within this dataset and the event is flagged. Deleted authors get
/// the explicit Unknown cohort.
inline void assign_cohorts(std::vector<CommentEvent>& events,
                           const std::unordered_map<std::string, int>* first_activity = nullptr) {
  std::unordered_map<std::string, int> dataset_min_year;
  for (const CommentEvent& e : events) {
    if (is_deleted_author(e.author)) continue;
    auto [it, inserted] = dataset_min_year.try_emplace(e.author, e.quarter.year);
    if (!inserted && e.quarter.year < it->second) it->second = e.quarter.year;
  }
  for (CommentEvent& e : events) {
    e.cohort_assigned = true;
    e.cohort_fallback = false;
    if (is_deleted_author(e.author)) {
      e.cohort = std::nullopt;
      continue;
    }
    if (first_activity) {
      auto it = first_activity->find(e.author);
      if (it != first_activity->end()) {
        e.cohort = it->second;
        continue;
      }
    }
    e.cohort = dataset_min_year.at(e.author);
    e.cohort_fallback = true;
  }
}

}  // namespace stancekit
