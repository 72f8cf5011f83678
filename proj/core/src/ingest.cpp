#include "bss/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <optional>
#include <unordered_set>

#include "bss/csv.hpp"
#include "bss/errors.hpp"

namespace bss::ingest {

namespace {

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> parse_bool(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  return std::nullopt;
}

// Resolves the named columns, throwing on the first absent one.
std::vector<int> require_columns(const csv::Table& table, const std::string& table_name,
                                 const std::vector<std::string>& names) {
  std::vector<int> idx;
  for (const auto& name : names) {
    const int c = table.column(name);
    if (c < 0) throw DataError(table_name + ": missing column '" + name + "'");
    idx.push_back(c);
  }
  return idx;
}

}  // namespace

const Location& CleanedDataset::location(const std::string& id) const {
  const auto it = location_index.find(id);
  if (it == location_index.end()) throw DataError("unknown location_id '" + id + "'");
  return locations[it->second];
}

std::vector<Location> parse_locations(std::istream& rows, std::vector<RejectedRow>& rejects) {
  const csv::Table table = csv::read_csv(rows);
  const auto cols = require_columns(
      table, "locations",
      {"location_id", "latitude", "longitude", "is_fixed_station", "station_name"});
  std::unordered_set<std::string> seen;
  std::vector<Location> out;

  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      rejects.push_back({"locations", row.line, "wrong field count"});
      continue;
    }
    Location loc;
    loc.location_id = row.fields[cols[0]];
    if (loc.location_id.empty()) {
      rejects.push_back({"locations", row.line, "empty location_id"});
      continue;
    }
    if (!seen.insert(loc.location_id).second) {
      throw DataError("duplicate location_id '" + loc.location_id + "'");
    }
    const std::string& lat_text = row.fields[cols[1]];
    const std::string& lon_text = row.fields[cols[2]];
    if (lat_text.empty() || lon_text.empty()) {
      loc.has_coordinates = false;
    } else {
      const auto lat = parse_number(lat_text);
      const auto lon = parse_number(lon_text);
      if (!lat || !lon) {
        rejects.push_back({"locations", row.line, "non-numeric coordinate"});
        continue;
      }
      loc.point = geo::GeoPoint{*lat, *lon};
      if (!geo::is_valid(loc.point)) {
        rejects.push_back({"locations", row.line, "coordinate out of range"});
        continue;
      }
    }
    const auto fixed = parse_bool(row.fields[cols[3]]);
    if (!fixed) {
      rejects.push_back({"locations", row.line, "bad is_fixed_station flag"});
      continue;
    }
    loc.is_fixed_station = *fixed;
    loc.station_name = row.fields[cols[4]];
    out.push_back(std::move(loc));
  }
  return out;
}

std::vector<Rental> parse_rentals(std::istream& rows, std::vector<RejectedRow>& rejects) {
  const csv::Table table = csv::read_csv(rows);
  const auto cols = require_columns(
      table, "rentals",
      {"rental_id", "start_time", "end_time", "rental_location_id", "return_location_id"});
  std::unordered_set<std::string> seen;
  std::vector<Rental> out;

  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      rejects.push_back({"rentals", row.line, "wrong field count"});
      continue;
    }
    Rental rental;
    rental.rental_id = row.fields[cols[0]];
    if (rental.rental_id.empty()) {
      rejects.push_back({"rentals", row.line, "empty rental_id"});
      continue;
    }
    if (!seen.insert(rental.rental_id).second) {
      throw DataError("duplicate rental_id '" + rental.rental_id + "'");
    }
    const auto start = timeutil::parse_iso8601(row.fields[cols[1]]);
    const auto end = timeutil::parse_iso8601(row.fields[cols[2]]);
    if (!start || !end) {
      rejects.push_back({"rentals", row.line, "unparseable timestamp"});
      continue;
    }
    if (*end < *start) {
      rejects.push_back({"rentals", row.line, "start_time after end_time"});
      continue;
    }
    rental.start_time = *start;
    rental.end_time = *end;
    rental.rental_location_id = row.fields[cols[3]];
    rental.return_location_id = row.fields[cols[4]];
    out.push_back(std::move(rental));
  }
  return out;
}

RawTables parse_tables(std::istream& rental_rows, std::istream& location_rows) {
  RawTables out;
  out.locations = parse_locations(location_rows, out.rejects);
  out.rentals = parse_rentals(rental_rows, out.rejects);
  return out;
}

namespace {

struct CleanState {
  std::vector<Location> locations;
  std::vector<Rental> rentals;
  std::vector<AuditEntry> audit;

  // Drops locations matching `bad`, and all rentals touching a dropped id.
  void drop_locations(const std::string& rule,
                      const std::function<bool(const Location&)>& bad) {
    std::unordered_set<std::string> dropped;
    std::vector<Location> kept_locs;
    kept_locs.reserve(locations.size());
    for (auto& loc : locations) {
      if (bad(loc)) {
        dropped.insert(loc.location_id);
      } else {
        kept_locs.push_back(std::move(loc));
      }
    }
    std::size_t rentals_dropped = 0;
    std::vector<Rental> kept_rentals;
    kept_rentals.reserve(rentals.size());
    for (auto& r : rentals) {
      if (dropped.count(r.rental_location_id) || dropped.count(r.return_location_id)) {
        ++rentals_dropped;
      } else {
        kept_rentals.push_back(std::move(r));
      }
    }
    audit.push_back({rule, dropped.size(), "locations"});
    audit.push_back({rule, rentals_dropped, "rentals"});
    locations = std::move(kept_locs);
    rentals = std::move(kept_rentals);
  }

  std::size_t drop_rentals(const std::function<bool(const Rental&)>& bad) {
    std::size_t removed = 0;
    std::vector<Rental> kept;
    kept.reserve(rentals.size());
    for (auto& r : rentals) {
      if (bad(r)) {
        ++removed;
      } else {
        kept.push_back(std::move(r));
      }
    }
    rentals = std::move(kept);
    return removed;
  }
};

}  // namespace

CleanedDataset clean(const RawTables& raw, const geo::BoundingRegion& region) {
  geo::validate_region(region);

  CleanState st;
  st.locations = raw.locations;
  st.rentals = raw.rentals;

  // (1) region filter; only decidable for rows that carry coordinates.
  st.drop_locations("out_of_region", [&](const Location& loc) {
    return loc.has_coordinates && !geo::contains(region, loc.point);
  });

  // (2) missing coordinates.
  st.drop_locations("missing_coordinates",
                    [](const Location& loc) { return !loc.has_coordinates; });

  // (3) null endpoint references.
  const std::size_t null_refs = st.drop_rentals([](const Rental& r) {
    return r.rental_location_id.empty() || r.return_location_id.empty();
  });
  st.audit.push_back({"null_location_ref", null_refs, "rentals"});

  // (4) + (5), repeated to a fixpoint: dropping dangling rentals can orphan
  // locations, whose removal must not strand new rentals.
  std::size_t dangling_total = 0;
  std::size_t unreferenced_total = 0;
  for (;;) {
    std::unordered_set<std::string> known;
    for (const auto& loc : st.locations) known.insert(loc.location_id);
    const std::size_t dangling = st.drop_rentals([&](const Rental& r) {
      return !known.count(r.rental_location_id) || !known.count(r.return_location_id);
    });
    dangling_total += dangling;

    std::unordered_set<std::string> referenced;
    for (const auto& r : st.rentals) {
      referenced.insert(r.rental_location_id);
      referenced.insert(r.return_location_id);
    }
    std::size_t unreferenced = 0;
    std::vector<Location> kept;
    kept.reserve(st.locations.size());
    for (auto& loc : st.locations) {
      if (!loc.is_fixed_station && !referenced.count(loc.location_id)) {
        ++unreferenced;
      } else {
        kept.push_back(std::move(loc));
      }
    }
    st.locations = std::move(kept);
    unreferenced_total += unreferenced;

    if (dangling == 0 && unreferenced == 0) break;
  }
  st.audit.push_back({"dangling_location_ref", dangling_total, "rentals"});
  st.audit.push_back({"unreferenced_location", unreferenced_total, "locations"});

  CleanedDataset out;
  out.locations = std::move(st.locations);
  out.rentals = std::move(st.rentals);
  out.audit = std::move(st.audit);
  std::sort(out.locations.begin(), out.locations.end(),
            [](const Location& a, const Location& b) { return a.location_id < b.location_id; });
  for (std::size_t i = 0; i < out.locations.size(); ++i) {
    out.location_index.emplace(out.locations[i].location_id, i);
    if (out.locations[i].is_fixed_station) {
      out.fixed_station_ids.push_back(out.locations[i].location_id);
    }
  }
  if (out.fixed_station_ids.empty()) {
    throw DataError("no fixed stations survive cleaning");
  }
  return out;
}

}  // namespace bss::ingest
