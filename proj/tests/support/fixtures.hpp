#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "dialogos/domain/domain_builder.hpp"

namespace dialogos::testing {

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("dialogos-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

    std::string write(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::filesystem::create_directories(p.parent_path());
        std::ofstream(p, std::ios::binary) << content;
        return p.string();
    }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::filesystem::path source_dir() {
    if (const char* env = std::getenv("DIALOGOS_SOURCE_DIR")) return env;
    return std::filesystem::path(__FILE__).parent_path().parent_path().parent_path();
}

// The three-row flower table used by the unit tests.
inline constexpr const char* kFlowerCsv =
    "id,name,type,color,price\n"
    "1,rosa,rose,red,cheap\n"
    "2,tulipa,tulip,yellow,expensive\n"
    "3,rubra,rose,red,expensive\n";

inline DomainBuildSpec flower_spec(const TempDir& dir) {
    DomainBuildSpec spec;
    spec.csv_path = dir.write("flowers.csv", kFlowerCsv);
    spec.table_name = "flowers";
    spec.informable_columns = {"type", "color", "price"};
    spec.requestable_columns = {"name", "type", "color", "price"};
    spec.system_requestable_columns = {"type", "color", "price"};
    spec.ontology_path = dir.file("flowers.json");
    spec.db_path = dir.file("flowers.db");
    return spec;
}

inline Domain flower_domain() {
    TempDir dir;
    return build_domain_in_memory(flower_spec(dir));
}

// The shipped toy flower-shop domain under data/.
inline Domain toy_domain() {
    DomainBuildSpec spec;
    spec.csv_path = (source_dir() / "data" / "flowershop.csv").string();
    spec.table_name = "flowershop";
    spec.informable_columns = {"type", "color", "price"};
    spec.requestable_columns = {"address", "color", "name", "phone", "price", "type"};
    spec.system_requestable_columns = {"type", "color", "price"};
    return build_domain_in_memory(spec);
}

}  // namespace dialogos::testing
