#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

namespace testutil {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("relml-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Small user / movie / rating schema. Movies m2 and m3 share the raters
/// u2, u3 and u4; m1 and m4 share none.
inline fs::path write_toy_dataset(const fs::path& dir) {
  write_file(dir / "users.csv",
             "user_id,age,gender\n"
             "u1,23,F\nu2,35,M\nu3,41,F\nu4,19,M\nu5,52,F\n");
  write_file(dir / "movies.csv",
             "movie_id,year,genre\n"
             "m1,1994,drama\nm2,1999,comedy\nm3,2001,comedy\nm4,1987,drama\n");
  write_file(dir / "ratings.csv",
             "user_id,movie_id,rating,role\n"
             "u1,m1,5,lead\n"
             "u1,m2,3,lead\n"
             "u2,m2,4,lead\n"
             "u2,m3,4,extra\n"
             "u3,m2,2,lead\n"
             "u3,m3,2,lead\n"
             "u4,m2,5,extra\n"
             "u4,m3,1,extra\n"
             "u4,m4,3,lead\n"
             "u5,m4,4,lead\n");
  write_file(dir / "manifest.json", R"({
  "entities": [
    {"name": "User", "file": "users.csv", "key": "user_id",
     "attributes": [{"column": "age", "kind": "numerical"},
                    {"column": "gender", "kind": "categorical"}]},
    {"name": "Movie", "file": "movies.csv", "key": "movie_id",
     "attributes": [{"column": "year", "kind": "numerical"},
                    {"column": "genre", "kind": "categorical"}],
     "label": "genre"}
  ],
  "association": {"name": "Ratings", "file": "ratings.csv",
                  "parent": {"table": "User", "column": "user_id"},
                  "child": {"table": "Movie", "column": "movie_id"},
                  "attributes": [{"column": "rating", "kind": "numerical"},
                                 {"column": "role", "kind": "categorical"}]}
})");
  return dir / "manifest.json";
}

}  // namespace testutil
