// Writes synthetic stand-ins for the four benchmark datasets into a
// directory: <name>.csv plus <name>.schema.json. Shapes, column kinds and
// value ranges follow the public datasets; the values themselves are drawn
// from a fixed seed and are not the originals.
//
//   make_datasets <out-dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Col {
  std::string name;
  std::string kind = "numeric";
  std::string role = "regular";
};

void write_schema(const fs::path& dir, const std::string& name, const std::vector<Col>& cols, std::size_t rows) {
  json j;
  j["name"] = name;
  j["delimiter"] = ",";
  std::size_t regular = 0;
  for (const auto& c : cols) {
    j["columns"].push_back({{"name", c.name}, {"kind", c.kind}, {"role", c.role}});
    regular += c.role == "regular";
  }
  j["expected_regular_attributes"] = regular;
  j["expected_rows"] = rows;
  std::ofstream(dir / (name + ".schema.json")) << j.dump(2) << '\n';
}

void write_csv(const fs::path& dir, const std::string& name, const std::vector<Col>& cols,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(dir / (name + ".csv"));
  for (std::size_t j = 0; j < cols.size(); ++j) out << (j ? "," : "") << cols[j].name;
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << '\n';
  }
}

std::string num(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// E. coli protein localisation: 336 rows, sequence id, seven scores in
// [0, 1], localisation class. Class sizes match the public file.
void ecoli(const fs::path& dir, std::mt19937_64& rng) {
  struct Site {
    const char* name;
    int count;
    double mcg, gvh, aac, alm1, alm2;
  };
  const Site sites[] = {{"cp", 143, 0.38, 0.41, 0.47, 0.36, 0.41}, {"im", 77, 0.52, 0.46, 0.44, 0.75, 0.74},
                        {"pp", 52, 0.66, 0.61, 0.48, 0.38, 0.41},  {"imU", 35, 0.54, 0.47, 0.52, 0.77, 0.72},
                        {"om", 20, 0.71, 0.60, 0.63, 0.48, 0.34},  {"omL", 5, 0.75, 0.50, 0.57, 0.46, 0.29},
                        {"imL", 2, 0.55, 0.45, 0.60, 0.73, 0.75},  {"imS", 2, 0.61, 0.61, 0.45, 0.65, 0.61}};
  std::normal_distribution<double> noise(0.0, 0.1);
  const std::vector<Col> cols = {{"sequence_name", "nominal", "id"}, {"mcg"}, {"gvh"}, {"lip"}, {"chg"},
                                 {"aac"}, {"alm1"}, {"alm2"}, {"class", "nominal"}};
  std::vector<std::vector<std::string>> rows;
  int id = 0;
  for (const auto& s : sites) {
    for (int i = 0; i < s.count; ++i) {
      const std::string cls = s.name;
      const double lip = (cls == "omL" || cls == "imL") ? 1.0 : 0.48;
      const double chg = (cls == "imL" && i == 0) ? 1.0 : 0.5;
      rows.push_back({"SEQ" + std::to_string(++id), num(clamp01(s.mcg + noise(rng)), 2),
                      num(clamp01(s.gvh + noise(rng)), 2), num(lip, 2), num(chg, 2),
                      num(clamp01(s.aac + noise(rng)), 2), num(clamp01(s.alm1 + noise(rng)), 2),
                      num(clamp01(s.alm2 + noise(rng)), 2), cls});
    }
  }
  std::shuffle(rows.begin(), rows.end(), rng);
  write_csv(dir, "e-coli", cols, rows);
  write_schema(dir, "e-coli", cols, rows.size());
}

// Acute inflammations: 120 patients, temperature plus five yes/no symptoms
// and two yes/no diagnoses driven by the symptoms.
void acute(const fs::path& dir, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> temp(35.5, 41.5);
  std::bernoulli_distribution coin(0.5), rare(0.1);
  const std::vector<Col> cols = {{"temperature"},
                                 {"nausea", "nominal"},
                                 {"lumbar_pain", "nominal"},
                                 {"urine_pushing", "nominal"},
                                 {"micturition_pains", "nominal"},
                                 {"burning_urethra", "nominal"},
                                 {"inflammation_bladder", "nominal"},
                                 {"nephritis", "nominal"}};
  auto yn = [](bool b) { return std::string(b ? "yes" : "no"); };
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 120; ++i) {
    const double t = std::round(temp(rng) * 10.0) / 10.0;
    const bool fever = t >= 38.0;
    const bool lumbar = fever ? !rare(rng) : coin(rng);
    const bool nausea = fever && lumbar && coin(rng);
    const bool pushing = coin(rng) || !fever;
    const bool micturition = pushing && coin(rng);
    const bool burning = micturition ? coin(rng) : rare(rng);
    const bool bladder = pushing && (micturition || !lumbar);
    const bool nephritis = fever && lumbar;
    rows.push_back({num(t, 1), yn(nausea), yn(lumbar), yn(pushing), yn(micturition), yn(burning), yn(bladder),
                    yn(nephritis)});
  }
  write_csv(dir, "acute-implant", cols, rows);
  write_schema(dir, "acute-implant", cols, rows.size());
}

// Blood transfusion service centre: 748 donors. As in the public file,
// monetary is exactly 250 times frequency.
void blood(const fs::path& dir, std::mt19937_64& rng) {
  std::exponential_distribution<double> recency(1.0 / 9.5);
  std::geometric_distribution<int> freq(1.0 / 5.5);
  std::uniform_int_distribution<int> extra(0, 40);
  const std::vector<Col> cols = {{"recency"}, {"frequency"}, {"monetary"}, {"time"}, {"donated", "nominal"}};
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 748; ++i) {
    const int r = std::min(74, static_cast<int>(recency(rng)));
    const int f = std::min(50, 1 + freq(rng));
    const int t = std::min(98, r + 2 + 2 * f + extra(rng));
    const double p = r < 4 && f > 3 ? 0.45 : r < 10 ? 0.3 : 0.12;
    const bool donated = std::bernoulli_distribution(p)(rng);
    rows.push_back({std::to_string(r), std::to_string(f), std::to_string(250 * f), std::to_string(t),
                    donated ? "1" : "0"});
  }
  write_csv(dir, "blood-transfusion", cols, rows);
  write_schema(dir, "blood-transfusion", cols, rows.size());
}

// Prostate cancer screening table: 100 patients, an id, a diagnosis and
// seventeen measurements derived from a few latent tumour properties.
void prostate(const fs::path& dir, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::bernoulli_distribution malignant(0.62);
  std::vector<Col> cols = {{"id", "nominal", "id"}, {"diagnosis", "nominal"}};
  const char* names[] = {"radius",       "texture",       "perimeter",        "area",
                         "smoothness",   "compactness",   "symmetry",         "fractal_dimension",
                         "psa",          "psa_density",   "age",              "gland_volume",
                         "gleason_score", "lesion_count", "capsule_distance", "adc_mean",
                         "t2_intensity"};
  for (const char* n : names) cols.push_back({n});
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 100; ++i) {
    const bool m = malignant(rng);
    const double size = (m ? 0.8 : -0.5) + 0.7 * z(rng);
    const double shape = (m ? 0.5 : -0.3) + 0.8 * z(rng);
    const double radius = std::max(6.0, 17.0 + 3.0 * size + z(rng));
    const double texture = 18.0 + 4.0 * z(rng);
    const double perimeter = 2.0 * M_PI * radius * (1.0 + 0.04 * z(rng));
    const double area = M_PI * radius * radius * (1.0 + 0.06 * z(rng));
    const double smooth = 0.10 + 0.012 * shape + 0.01 * z(rng);
    const double compact = std::max(0.02, 0.13 + 0.04 * shape + 0.03 * z(rng));
    const double symmetry = 0.19 + 0.02 * z(rng);
    const double fractal = 0.064 + 0.006 * z(rng);
    const double psa = std::max(0.3, std::exp(1.5 + 0.5 * size + 0.4 * z(rng)));
    const double volume = std::max(12.0, 40.0 + 12.0 * z(rng));
    const double age = std::round(std::clamp(64.0 + 7.0 * z(rng) + 2.0 * size, 42.0, 88.0));
    const double gleason = std::clamp(std::round(6.5 + 0.8 * shape + 0.6 * z(rng)), 5.0, 10.0);
    const double lesions = std::max(0.0, std::round(1.0 + (m ? 1.0 : 0.0) + 0.8 * z(rng)));
    const double capsule = std::max(0.0, 6.0 - 2.0 * size + 1.5 * z(rng));
    const double adc = 1100.0 - 150.0 * shape + 80.0 * z(rng);
    const double t2 = 420.0 - 40.0 * size + 30.0 * z(rng);
    rows.push_back({"P" + std::to_string(i + 1), m ? "M" : "B", num(radius, 2), num(texture, 2), num(perimeter, 2),
                    num(area, 1), num(smooth, 4), num(compact, 4), num(symmetry, 4), num(fractal, 4), num(psa, 2),
                    num(psa / volume, 4), num(age, 0), num(volume, 1), num(gleason, 0), num(lesions, 0),
                    num(capsule, 2), num(adc, 1), num(t2, 1)});
  }
  write_csv(dir, "prostate-cancer", cols, rows);
  write_schema(dir, "prostate-cancer", cols, rows.size());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_datasets <out-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);
  std::mt19937_64 rng(20240611);
  ecoli(dir, rng);
  acute(dir, rng);
  blood(dir, rng);
  prostate(dir, rng);
  return 0;
}
