#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "bss/geo.hpp"
#include "bss/timeutil.hpp"

namespace bss::ingest {

struct Location {
  std::string location_id;
  geo::GeoPoint point;
  bool has_coordinates = true;  // false when latitude/longitude were blank
  bool is_fixed_station = false;
  std::string station_name;  // empty = none
};

struct Rental {
  std::string rental_id;
  timeutil::Timestamp start_time;
  timeutil::Timestamp end_time;
  std::string rental_location_id;  // empty = null reference
  std::string return_location_id;  // empty = null reference
};

// A row that failed row-level validation. Kept, never silently dropped.
struct RejectedRow {
  std::string table;  // "locations" or "rentals"
  std::size_t line = 0;
  std::string reason;
};

struct RawTables {
  std::vector<Location> locations;
  std::vector<Rental> rentals;
  std::vector<RejectedRow> rejects;
};

// Expected headers:
//   locations: location_id,latitude,longitude,is_fixed_station,station_name
//   rentals:   rental_id,start_time,end_time,rental_location_id,return_location_id
// Throws DataError on a missing column or duplicate primary key.
RawTables parse_tables(std::istream& rental_rows, std::istream& location_rows);

// Single-table parsers behind parse_tables; rejects are appended.
std::vector<Location> parse_locations(std::istream& rows, std::vector<RejectedRow>& rejects);
std::vector<Rental> parse_rentals(std::istream& rows, std::vector<RejectedRow>& rejects);

// Rows removed by one cleaning rule from one table.
struct AuditEntry {
  std::string rule;
  std::size_t rows_removed = 0;
  std::string table;
};

struct CleanedDataset {
  std::vector<Location> locations;
  std::vector<Rental> rentals;
  std::vector<std::string> fixed_station_ids;  // sorted
  std::vector<AuditEntry> audit;

  // location_id -> index into locations
  std::unordered_map<std::string, std::size_t> location_index;

  const Location& location(const std::string& id) const;
};

// Applies the cleaning rules in order:
//   out_of_region, missing_coordinates, null_location_ref,
//   dangling_location_ref, unreferenced_location
// with the last two repeated to a fixpoint. Fixed stations are exempt from
// the unreferenced-location drop. Throws DataError when no fixed station
// survives.
CleanedDataset clean(const RawTables& raw, const geo::BoundingRegion& region);

}  // namespace bss::ingest
