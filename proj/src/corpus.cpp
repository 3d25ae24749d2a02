#include "glem/corpus.hpp"

#include "glem/error.hpp"
#include "glem/rng.hpp"
#include "detail/container.hpp"
#include "detail/hash.hpp"
#include "detail/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace glem {

using detail::OrderedJson;

namespace {

EmbeddingSet load_embeddings_binary(const std::string& path) {
    detail::Container c = detail::read_container(path);
    const auto& h = c.header;
    require(h.is_object() && h.contains("rows") && h.contains("dim") && h.contains("records"),
            Status::MalformedHeader, "embedding header missing rows/dim/records in '" + path + "'");
    require(h.value("dtype", "") == std::string("f32"), Status::MalformedHeader,
            "unsupported dtype in '" + path + "'");
    const auto rows = h.at("rows").get<std::uint64_t>();
    const auto dim = h.at("dim").get<std::uint64_t>();
    const auto& records = h.at("records");
    require(records.is_array() && records.size() == rows, Status::MalformedHeader,
            "record list does not match declared row count in '" + path + "'");

    const std::size_t expected = static_cast<std::size_t>(rows) * dim * sizeof(float);
    if (c.payload.size() < expected)
        fail(Status::PayloadTruncated, "payload holds " +
                 std::to_string(c.payload.size() / (dim ? dim * sizeof(float) : 1)) +
                 " rows but header declares " + std::to_string(rows) + " in '" + path + "'");
    if (c.payload.size() > expected)
        fail(Status::DimensionMismatch,
             "payload larger than header declares in '" + path + "'");

    EmbeddingSet set;
    set.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    if (expected > 0)
        std::memcpy(set.matrix.data(), c.payload.data(), expected);

    set.records.reserve(rows);
    for (const auto& r : records) {
        UtteranceRecord rec;
        rec.utterance_id = r.value("id", "");
        rec.language = r.value("lang", "");
        rec.speaker_id = r.value("speaker", "");
        rec.gender = gender_from_string(r.value("gender", ""));
        rec.predicted_language = r.value("pred", "");
        set.records.push_back(std::move(rec));
    }
    set.validate();
    return set;
}

EmbeddingSet load_embeddings_csv(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), Status::IoError, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::vector<std::string> lines = detail::split_lines(buf.str());
    require(!lines.empty(), Status::MalformedHeader, "empty embedding CSV '" + path + "'");

    const std::vector<std::string> head = detail::split(lines[0], ',');
    require(head.size() >= 6 && head[0] == "id" && head[1] == "lang" && head[2] == "speaker" &&
                head[3] == "gender" && head[4] == "pred" && head[5] == "e0",
            Status::MalformedHeader, "unexpected embedding CSV header in '" + path + "'");
    const std::size_t dim = head.size() - 5;

    EmbeddingSet set;
    const std::size_t rows = lines.size() - 1;
    set.matrix.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(dim));
    set.records.reserve(rows);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::vector<std::string> cells = detail::split(lines[li], ',');
        require(cells.size() == dim + 5, Status::DimensionMismatch,
                "row " + std::to_string(li) + " has " + std::to_string(cells.size()) +
                    " cells, expected " + std::to_string(dim + 5));
        UtteranceRecord rec;
        rec.utterance_id = cells[0];
        rec.language = cells[1];
        rec.speaker_id = cells[2];
        rec.gender = gender_from_string(cells[3]);
        rec.predicted_language = cells[4];
        for (std::size_t d = 0; d < dim; ++d) {
            const double v = detail::parse_double(cells[5 + d], Status::NonFiniteValue,
                                                  "embedding CSV row " + std::to_string(li));
            if (!std::isfinite(v))
                fail(Status::NonFiniteValue, "non-finite value at (" + std::to_string(li - 1) +
                                                 ", " + std::to_string(d) + ") in '" + path + "'");
            set.matrix(static_cast<Eigen::Index>(li - 1), static_cast<Eigen::Index>(d)) =
                static_cast<float>(v);
        }
        set.records.push_back(std::move(rec));
    }
    set.validate();
    return set;
}

} // namespace

EmbeddingSet load_embeddings(const std::string& path, EmbeddingFormat format) {
    if (format == EmbeddingFormat::Auto)
        format = detail::file_has_container_magic(path) ? EmbeddingFormat::Binary
                                                        : EmbeddingFormat::Csv;
    return format == EmbeddingFormat::Binary ? load_embeddings_binary(path)
                                             : load_embeddings_csv(path);
}

void write_embeddings(const EmbeddingSet& set, const std::string& path, EmbeddingFormat format,
                      std::optional<std::uint64_t> seed) {
    set.validate();
    if (format == EmbeddingFormat::Auto)
        format = EmbeddingFormat::Binary;
    if (format == EmbeddingFormat::Binary) {
        OrderedJson header;
        header["version"] = 1;
        header["rows"] = static_cast<std::uint64_t>(set.rows());
        header["dim"] = static_cast<std::uint64_t>(set.dim());
        header["dtype"] = "f32";
        if (seed)
            header["seed"] = *seed;
        OrderedJson records = OrderedJson::array();
        for (const auto& r : set.records) {
            OrderedJson j;
            j["id"] = r.utterance_id;
            j["lang"] = r.language;
            if (!r.speaker_id.empty())
                j["speaker"] = r.speaker_id;
            if (r.gender != Gender::Unspecified)
                j["gender"] = gender_name(r.gender);
            if (!r.predicted_language.empty())
                j["pred"] = r.predicted_language;
            records.push_back(std::move(j));
        }
        header["records"] = std::move(records);
        detail::write_container(path, header, set.matrix.data(),
                                static_cast<std::size_t>(set.rows()) * set.dim() * sizeof(float));
        return;
    }

    std::string out = "id,lang,speaker,gender,pred";
    for (Eigen::Index d = 0; d < set.dim(); ++d)
        out += ",e" + std::to_string(d);
    out += '\n';
    for (Eigen::Index i = 0; i < set.rows(); ++i) {
        const auto& r = set.records[static_cast<std::size_t>(i)];
        out += r.utterance_id + ',' + r.language + ',' + r.speaker_id + ',' +
               gender_name(r.gender) + ',' + r.predicted_language;
        for (Eigen::Index d = 0; d < set.dim(); ++d) {
            out += ',';
            out += detail::format_float(set.matrix(i, d));
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::trunc);
    require(f.good(), Status::IoError, "cannot write '" + path + "'");
    f << out;
}

EmbeddingSet filter_by_count(const EmbeddingSet& set, std::size_t min_per_language,
                             std::size_t max_per_language, std::uint64_t seed) {
    require(min_per_language >= 1, Status::BadArgument, "min_per_language must be >= 1");
    require(max_per_language >= min_per_language, Status::BadArgument,
            "max_per_language must be >= min_per_language");

    const auto by_lang = set.rows_by_language();
    std::vector<Eigen::Index> keep;
    for (const auto& [lang, rows] : by_lang) {
        if (rows.size() < min_per_language)
            continue;
        if (rows.size() <= max_per_language) {
            keep.insert(keep.end(), rows.begin(), rows.end());
            continue;
        }
        CounterRng rng(seed, detail::fnv1a64(lang));
        for (std::size_t pick : rng.sample_indices(rows.size(), max_per_language))
            keep.push_back(rows[pick]);
    }
    require(!keep.empty(), Status::EmptyResult, "no language survives the count filter");
    std::sort(keep.begin(), keep.end()); // global row order preserved

    EmbeddingSet out;
    out.matrix.resize(static_cast<Eigen::Index>(keep.size()), set.dim());
    out.records.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.matrix.row(static_cast<Eigen::Index>(i)) = set.matrix.row(keep[i]);
        out.records.push_back(set.records[static_cast<std::size_t>(keep[i])]);
    }
    return out;
}

double lid_accuracy(const EmbeddingSet& set, const MetaTable* meta, bool restrict_to_training) {
    require(!restrict_to_training || meta != nullptr, Status::BadArgument,
            "restricting to training languages requires metadata");
    std::size_t considered = 0;
    std::size_t correct = 0;
    for (const auto& r : set.records) {
        if (r.predicted_language.empty())
            continue;
        if (restrict_to_training) {
            const LanguageMeta* m = meta->find(r.language);
            if (!m || !m->in_lid_training)
                continue;
        }
        ++considered;
        if (r.predicted_language == r.language)
            ++correct;
    }
    require(considered > 0, Status::NoPredictions, "no records with predictions to score");
    return static_cast<double>(correct) / static_cast<double>(considered);
}

MetaTable load_language_metadata(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), Status::IoError, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::vector<std::string> lines = detail::split_lines(buf.str());
    require(!lines.empty(), Status::MalformedHeader, "empty metadata TSV '" + path + "'");
    const std::vector<std::string> head = detail::split(lines[0], '\t');
    const std::vector<std::string> expected = {"iso",        "name", "family", "subfamily",
                                               "lat",        "lon",  "in_lid_training"};
    require(head == expected, Status::MalformedHeader,
            "unexpected metadata TSV header in '" + path + "'");

    MetaTable table;
    std::set<std::string> seen;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::vector<std::string> cells = detail::split(lines[li], '\t');
        require(cells.size() == 7, Status::InvalidRecord,
                "metadata row " + std::to_string(li) + " has " + std::to_string(cells.size()) +
                    " columns");
        LanguageMeta m;
        m.iso = cells[0];
        m.name = cells[1];
        m.family = cells[2];
        m.subfamily = cells[3];
        m.latitude = detail::parse_double(cells[4], Status::InvalidRecord,
                                          "metadata row " + std::to_string(li));
        m.longitude = detail::parse_double(cells[5], Status::InvalidRecord,
                                           "metadata row " + std::to_string(li));
        require(cells[6] == "0" || cells[6] == "1", Status::InvalidRecord,
                "in_lid_training must be 0 or 1 in metadata row " + std::to_string(li));
        m.in_lid_training = cells[6] == "1";
        require(!m.iso.empty(), Status::InvalidRecord,
                "empty iso in metadata row " + std::to_string(li));
        require(seen.insert(m.iso).second, Status::InvalidRecord,
                "duplicate iso '" + m.iso + "' in metadata");
        require(m.latitude >= -90.0 && m.latitude <= 90.0, Status::InvalidRecord,
                "latitude out of range for '" + m.iso + "'");
        require(m.longitude > -180.0 && m.longitude <= 180.0, Status::InvalidRecord,
                "longitude out of range for '" + m.iso + "'");
        table.rows.push_back(std::move(m));
    }
    return table;
}

std::vector<int> default_meaning_inventory() {
    std::vector<int> ids(100);
    for (int i = 0; i < 100; ++i)
        ids[i] = i + 1;
    return ids;
}

WordList load_wordlists(const std::string& path, std::vector<int> inventory) {
    std::ifstream in(path);
    require(in.good(), Status::IoError, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::vector<std::string> lines = detail::split_lines(buf.str());
    require(!lines.empty(), Status::MalformedHeader, "empty word list TSV '" + path + "'");
    const std::vector<std::string> head = detail::split(lines[0], '\t');
    const std::vector<std::string> expected = {"iso", "meaning_id", "transcription"};
    require(head == expected, Status::MalformedHeader,
            "unexpected word list TSV header in '" + path + "'");

    std::sort(inventory.begin(), inventory.end());
    WordList list;
    list.inventory = std::move(inventory);

    for (std::size_t li = 1; li < lines.size(); ++li) {
        const std::vector<std::string> cells = detail::split(lines[li], '\t');
        require(cells.size() == 3, Status::InvalidRecord,
                "word list row " + std::to_string(li) + " has " + std::to_string(cells.size()) +
                    " columns");
        const std::string& iso = cells[0];
        const int meaning = static_cast<int>(detail::parse_int(
            cells[1], Status::InvalidRecord, "word list row " + std::to_string(li)));
        require(std::binary_search(list.inventory.begin(), list.inventory.end(), meaning),
                Status::UnknownMeaningId,
                "meaning id " + std::to_string(meaning) + " not in the declared inventory");

        const std::u32string raw =
            detail::decode_utf8(cells[2], "word list row " + std::to_string(li));
        WordList::Segments segments;
        for (char32_t cp : raw) {
            if (cp == U'~' || cp == U'$' || cp == U'*' || cp == U'"' || cp == U' ')
                continue;
            segments.push_back(cp);
        }
        require(!segments.empty(), Status::EmptyTranscription,
                "transcription empty after modifier stripping in row " + std::to_string(li));
        list.languages[iso][meaning].push_back(std::move(segments));
    }
    return list;
}

} // namespace glem
