#include "travelsim/types.hpp"

#include <cctype>
#include <cmath>

namespace travelsim {

std::string normalize_place(const std::string& name) {
    std::string out;
    out.reserve(name.size());
    bool pending_space = false;
    for (unsigned char c : name) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string to_string(PoiCategory c) {
    switch (c) {
        case PoiCategory::attraction: return "attraction";
        case PoiCategory::restaurant: return "restaurant";
        case PoiCategory::hotel: return "hotel";
        case PoiCategory::station: return "station";
        case PoiCategory::other: return "other";
    }
    throw ArgumentError("unknown poi category");
}

PoiCategory poi_category_from_string(const std::string& s) {
    if (s == "attraction") return PoiCategory::attraction;
    if (s == "restaurant") return PoiCategory::restaurant;
    if (s == "hotel") return PoiCategory::hotel;
    if (s == "station") return PoiCategory::station;
    if (s == "other") return PoiCategory::other;
    throw ParseError("unknown poi category '" + s + "'");
}

PoiIndex::PoiIndex(std::vector<POI> pois) : pois_(std::move(pois)) {
    for (size_t i = 0; i < pois_.size(); ++i) {
        check_geo(pois_[i].location);
        if (pois_[i].id.empty()) throw ParseError("poi with empty id");
        if (!by_id_.emplace(pois_[i].id, i).second)
            throw ParseError("duplicate poi id '" + pois_[i].id + "'");
        by_name_.emplace(normalize_place(pois_[i].name), i);
    }
}

const POI* PoiIndex::by_id(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &pois_[it->second];
}

const POI* PoiIndex::by_name(const std::string& name) const {
    auto it = by_name_.find(normalize_place(name));
    return it == by_name_.end() ? nullptr : &pois_[it->second];
}

const POI* PoiIndex::resolve(const std::string& id_or_name) const {
    if (const POI* p = by_id(id_or_name)) return p;
    return by_name(id_or_name);
}

std::string to_string(TravelerType t) {
    switch (t) {
        case TravelerType::single: return "single";
        case TravelerType::couple: return "couple";
        case TravelerType::family: return "family";
        case TravelerType::group: return "group";
    }
    throw ArgumentError("unknown traveler type");
}

TravelerType traveler_type_from_string(const std::string& s) {
    if (s == "single") return TravelerType::single;
    if (s == "couple") return TravelerType::couple;
    if (s == "family") return TravelerType::family;
    if (s == "group") return TravelerType::group;
    throw ParseError("unknown traveler type '" + s + "'");
}

void check_profile(const TravelerProfile& p) {
    if (p.group.empty()) throw ArgumentError("profile '" + p.id + "': group is empty");
    if (!(p.initial_stamina > 0.0) || p.initial_stamina > 10.0 || !std::isfinite(p.initial_stamina))
        throw ArgumentError("profile '" + p.id + "': initial stamina outside (0, 10]");
}

}  // namespace travelsim
