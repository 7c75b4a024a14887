#include <array>
#include <fstream>

#include "relml/error.hpp"
#include "relml/io.hpp"
#include "relml/log.hpp"
#include "table_builder.hpp"

namespace relml {

namespace fs = std::filesystem;

namespace {

constexpr std::array<const char*, 19> kGenres = {
    "unknown", "Action", "Adventure", "Animation", "Children's", "Comedy", "Crime",
    "Documentary", "Drama", "Fantasy", "Film-Noir", "Horror", "Musical", "Mystery",
    "Romance", "Sci-Fi", "Thriller", "War", "Western"};

std::vector<std::vector<std::string>> read_lines(const fs::path& path, char delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // Titles may contain quotes, so no quote handling here.
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t pos; (pos = line.find(delimiter, start)) != std::string::npos; start = pos + 1)
      fields.push_back(line.substr(start, pos - start));
    fields.push_back(line.substr(start));
    rows.push_back(std::move(fields));
  }
  return rows;
}

// "01-Jan-1995" -> "1995"; empty stays empty (mean-imputed later).
std::string release_year(const std::string& date) {
  const auto t = detail::trim(date);
  if (t.size() < 4) return {};
  return t.substr(t.size() - 4);
}

}  // namespace

RelationalSchema load_movielens(const fs::path& dir, std::string_view task) {
  const bool item_task = task == "item" || task == "genre" || task == "movie-item";
  const bool user_task = task == "user" || task == "age" || task == "movie-user";
  if (!item_task && !user_task)
    throw Error(ErrorCode::InvalidArgument,
                "unknown MovieLens task '" + std::string(task) + "' (expected item or user)");

  const auto items = read_lines(dir / "u.item", '|');
  const auto users = read_lines(dir / "u.user", '|');
  const auto ratings = read_lines(dir / "u.data", '\t');

  // Movies: year + genre flags; label = the most frequent genre overall among
  // the movie's own genres.
  std::array<std::size_t, kGenres.size()> genre_count{};
  for (const auto& row : items) {
    if (row.size() != 5 + kGenres.size())
      throw Error(ErrorCode::MalformedInput, "u.item: expected 24 fields");
    for (std::size_t g = 0; g < kGenres.size(); ++g)
      if (detail::trim(row[5 + g]) == "1") ++genre_count[g];
  }

  csv::Table movies;
  movies.header = {"movie_id", "year"};
  for (const char* g : kGenres) movies.header.push_back(std::string("genre_") + g);
  movies.header.push_back("genre");
  for (const auto& row : items) {
    std::vector<std::string> out{detail::trim(row[0]), release_year(row[2])};
    int best = -1;
    for (std::size_t g = 0; g < kGenres.size(); ++g) {
      const bool on = detail::trim(row[5 + g]) == "1";
      out.push_back(on ? "1" : "0");
      if (on && (best < 0 || genre_count[g] > genre_count[static_cast<std::size_t>(best)]))
        best = static_cast<int>(g);
    }
    out.push_back(best < 0 ? "unknown" : kGenres[static_cast<std::size_t>(best)]);
    movies.rows.push_back(std::move(out));
  }
  std::vector<detail::ColumnSpec> movie_attrs{{"year", AttributeKind::Numerical}};
  for (const char* g : kGenres) movie_attrs.push_back({std::string("genre_") + g, AttributeKind::Numerical});

  csv::Table user_table;
  user_table.header = {"user_id", "age", "gender", "occupation"};
  for (const auto& row : users) {
    if (row.size() < 4) throw Error(ErrorCode::MalformedInput, "u.user: expected 5 fields");
    user_table.rows.push_back({detail::trim(row[0]), row[1], row[2], row[3]});
  }
  std::vector<detail::ColumnSpec> user_attrs{{"gender", AttributeKind::Categorical},
                                             {"occupation", AttributeKind::Categorical}};
  if (item_task) user_attrs.push_back({"age", AttributeKind::Numerical});

  auto movie_entity = detail::build_entity_table(
      "Movie", movies, "movie_id", movie_attrs,
      item_task ? std::optional(detail::LabelSpec{"genre", 0}) : std::nullopt, true);
  auto user_entity = detail::build_entity_table(
      "User", user_table, "user_id", user_attrs,
      user_task ? std::optional(detail::LabelSpec{"age", 5}) : std::nullopt, true);

  RelationalSchema schema{{std::move(user_entity), std::move(movie_entity)},
                          AssociationTable("Ratings", "User", "Movie", {"rating"}, {})};
  const auto& u = schema.table("User");
  const auto& m = schema.table("Movie");
  std::size_t duplicates = 0;
  for (const auto& row : ratings) {
    if (row.size() < 3) throw Error(ErrorCode::MalformedInput, "u.data: expected 4 fields");
    const auto p = u.find(detail::trim(row[0]));
    const auto c = m.find(detail::trim(row[1]));
    if (!p || !c)
      throw Error(ErrorCode::DanglingForeignKey, "u.data references unknown user or movie");
    const double rating = detail::parse_number(row[2], "u.data rating");
    if (!schema.association.add_row(*p, *c, std::span(&rating, 1), {})) ++duplicates;
  }
  if (duplicates) log_warning("u.data: dropped " + std::to_string(duplicates) + " repeated ratings");
  schema.association = normalize_association_numerics(schema.association);
  schema.validate();
  return schema.oriented_toward(item_task ? "Movie" : "User");
}

}  // namespace relml
