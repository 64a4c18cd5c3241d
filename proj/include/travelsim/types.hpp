#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "travelsim/geo.hpp"
#include "travelsim/stamina.hpp"

namespace travelsim {

// Case-folded, whitespace-collapsed place name. Trajectory and anchoring
// comparisons use exact equality on this form.
std::string normalize_place(const std::string& name);

enum class PoiCategory { attraction, restaurant, hotel, station, other };

std::string to_string(PoiCategory c);
PoiCategory poi_category_from_string(const std::string& s);

struct POI {
    std::string id;
    std::string name;
    GeoPoint location;
    PoiCategory category = PoiCategory::other;
    std::optional<std::string> blog_excerpt;
};

// Lookup over a POI dataset by id and by normalized name. Ids must be unique.
class PoiIndex {
  public:
    PoiIndex() = default;
    explicit PoiIndex(std::vector<POI> pois);

    const std::vector<POI>& all() const { return pois_; }
    const POI* by_id(const std::string& id) const;
    const POI* by_name(const std::string& name) const;  // normalized match
    // Resolves either an id or a name; nullptr when unknown.
    const POI* resolve(const std::string& id_or_name) const;

  private:
    std::vector<POI> pois_;
    std::map<std::string, size_t> by_id_;
    std::map<std::string, size_t> by_name_;
};

struct GroupMember {
    std::string gender;
    int age = 0;
};

enum class TravelerType { single, couple, family, group };

std::string to_string(TravelerType t);
TravelerType traveler_type_from_string(const std::string& s);

struct TravelerProfile {
    std::string id;
    std::vector<GroupMember> group;  // non-empty
    TravelerType type_label = TravelerType::single;
    std::string preferences;
    long long budget_minor = 0;  // minor currency units
    double initial_stamina = 0.0;  // (0, 10]
    stamina::StaminaRule stamina_rule;

    int group_size() const { return static_cast<int>(group.size()); }
};

// Throws ArgumentError when a profile invariant is violated.
void check_profile(const TravelerProfile& p);

}  // namespace travelsim
