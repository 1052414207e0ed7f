#include "bitopt/store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bitopt/error.hpp"

namespace bitopt {

namespace {

class LineCursor {
 public:
  LineCursor(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool consume(char c) {
    skip_ws();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, "line " + std::to_string(line_) + ", column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  std::string iri() {
    ++pos_;  // '<'
    auto end = text_.find('>', pos_);
    if (end == std::string_view::npos) error("unterminated IRI");
    std::string v(text_.substr(pos_, end - pos_));
    if (v.find_first_of(" \t\"<") != std::string::npos) error("invalid character in IRI");
    pos_ = end + 1;
    return v;
  }

  std::string quoted() {
    ++pos_;  // '"'
    std::string v;
    while (true) {
      if (pos_ >= text_.size()) error("unterminated literal");
      char c = text_[pos_++];
      if (c == '"') return v;
      if (c != '\\') {
        v += c;
        continue;
      }
      if (pos_ >= text_.size()) error("dangling escape");
      switch (char e = text_[pos_++]) {
        case 'n': v += '\n'; break;
        case 'r': v += '\r'; break;
        case 't': v += '\t'; break;
        case '"': v += '"'; break;
        case '\\': v += '\\'; break;
        case '\'': v += '\''; break;
        default: error(std::string("unsupported escape \\") + e);
      }
    }
  }

  Term term(bool subject) {
    skip_ws();
    char c = peek();
    if (c == '<') return Term::iri(iri());
    if (c == '"') {
      if (subject) error("literal in subject position");
      auto lexical = quoted();
      if (peek() == '@') error("language-tagged literals are not supported");
      if (peek() == '^' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '^') {
        pos_ += 2;
        if (peek() != '<') error("expected datatype IRI");
        auto dt = iri();
        if (dt != kXsdInteger) error("unsupported datatype <" + dt + ">");
        long long value = 0;
        auto [ptr, ec] = std::from_chars(lexical.data(), lexical.data() + lexical.size(), value);
        if (ec != std::errc{} || ptr != lexical.data() + lexical.size() || lexical.empty())
          error("invalid integer literal \"" + lexical + "\"");
        return Term::integer(value);
      }
      return Term::literal(std::move(lexical));
    }
    if (c == '_') error("blank nodes are not supported");
    if (c == '\0') error("unexpected end of line");
    error(std::string("unexpected character '") + c + "'");
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) fail(ErrorKind::Io, "truncated BitMat file");
  return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 | std::uint32_t{b[3]} << 24;
}

const char* class_name(int c) { return c == 0 ? "so" : c == 1 ? "s" : c == 2 ? "o" : "p"; }

Term parse_stored_term(const std::string& text, std::size_t line) {
  LineCursor cur(text, line);
  auto t = cur.term(false);
  if (!cur.done()) cur.error("trailing characters after term");
  return t;
}

}  // namespace

std::vector<std::array<Term, 3>> parse_ntriples(std::istream& in) {
  std::vector<std::array<Term, 3>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    LineCursor cur(line, number);
    if (cur.done()) continue;
    auto s = cur.term(true);
    cur.skip_ws();
    if (cur.peek() != '<') cur.error("predicate must be an IRI");
    auto p = Term::iri(cur.iri());
    auto o = cur.term(false);
    if (!cur.consume('.')) cur.error("expected '.'");
    if (!cur.done()) cur.error("trailing characters after '.'");
    out.push_back({std::move(s), std::move(p), std::move(o)});
  }
  return out;
}

TripleStore::TripleStore() : mutex_(std::make_unique<std::mutex>()) {}
TripleStore::TripleStore(TripleStore&&) noexcept = default;
TripleStore& TripleStore::operator=(TripleStore&&) noexcept = default;
TripleStore::~TripleStore() = default;

TripleStore TripleStore::from_terms(const std::vector<std::array<Term, 3>>& terms) {
  TripleStore st;
  st.dict_ = Dictionary::build(terms);
  st.triples_.reserve(terms.size());
  for (const auto& t : terms)
    st.triples_.push_back({st.dict_.subject_id(t[0]), st.dict_.predicate_id(t[1]), st.dict_.object_id(t[2])});
  std::sort(st.triples_.begin(), st.triples_.end());
  st.triples_.erase(std::unique(st.triples_.begin(), st.triples_.end()), st.triples_.end());
  st.index();
  return st;
}

TripleStore TripleStore::from_ntriples(std::istream& in) { return from_terms(parse_ntriples(in)); }

TripleStore TripleStore::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return from_ntriples(in);
}

void TripleStore::index() {
  by_p_.assign(dict_.num_predicates() + 1, {});
  by_s_.assign(dict_.num_subjects() + 1, {});
  by_o_.assign(dict_.num_objects() + 1, {});
  for (const auto& t : triples_) {
    by_p_[t.p].emplace_back(t.s, t.o);
    by_s_[t.s].emplace_back(t.p, t.o);
    by_o_[t.o].emplace_back(t.p, t.s);
  }
  cache_.clear();
}

BitMat TripleStore::build(BitMatKind kind, std::uint32_t slice) const {
  const std::uint32_t ns = dict_.num_subjects(), no = dict_.num_objects(), np = dict_.num_predicates();
  switch (kind) {
    case BitMatKind::SO:
      return BitMat::from_pairs(kind, slice, ns, no, slice < by_p_.size() && slice ? by_p_[slice] : decltype(by_p_)::value_type{});
    case BitMatKind::OS: {
      std::vector<std::pair<std::uint32_t, std::uint32_t>> flipped;
      if (slice && slice < by_p_.size())
        for (auto [s, o] : by_p_[slice]) flipped.emplace_back(o, s);
      return BitMat::from_pairs(kind, slice, no, ns, std::move(flipped));
    }
    case BitMatKind::PS:
      return BitMat::from_pairs(kind, slice, np, ns, slice < by_o_.size() && slice ? by_o_[slice] : decltype(by_o_)::value_type{});
    case BitMatKind::PO:
      return BitMat::from_pairs(kind, slice, np, no, slice < by_s_.size() && slice ? by_s_[slice] : decltype(by_s_)::value_type{});
    case BitMatKind::Derived: break;
  }
  fail(ErrorKind::Contract, "derived BitMats are not stored");
}

std::shared_ptr<const BitMat> TripleStore::bitmat(BitMatKind kind, std::uint32_t slice) const {
  std::lock_guard lock(*mutex_);
  auto& slot = cache_[{kind, slice}];
  if (!slot) slot = std::make_shared<const BitMat>(build(kind, slice));
  return slot;
}

std::size_t TripleStore::cached_bitmats() const {
  std::lock_guard lock(*mutex_);
  return cache_.size();
}

void write_bitmat(std::ostream& out, const BitMat& bm) {
  put_u32(out, static_cast<std::uint32_t>(bm.kind()));
  put_u32(out, bm.slice());
  put_u32(out, bm.rows());
  put_u32(out, bm.cols());
  put_u32(out, static_cast<std::uint32_t>(bm.triple_count()));
  for (std::uint32_t r = 1; r <= bm.rows(); ++r) {
    const auto& row = bm.row(r);
    auto len = static_cast<std::uint32_t>(row.payload().size());
    put_u32(out, len << 2 | (row.encoding() == RowEncoding::Positions ? 1u : 0u) << 1 | (row.first_bit() ? 1u : 0u));
    for (auto v : row.payload()) put_u32(out, v);
  }
}

BitMat read_bitmat(std::istream& in) {
  auto kind = get_u32(in);
  if (kind > static_cast<std::uint32_t>(BitMatKind::Derived)) fail(ErrorKind::Io, "bad BitMat kind");
  auto slice = get_u32(in), rows = get_u32(in), cols = get_u32(in), count = get_u32(in);
  BitMat bm(static_cast<BitMatKind>(kind), slice, rows, cols);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t r = 1; r <= rows; ++r) {
    auto head = get_u32(in);
    std::vector<std::uint32_t> payload(head >> 2);
    for (auto& v : payload) v = get_u32(in);
    auto enc = (head >> 1 & 1) ? RowEncoding::Positions : RowEncoding::RunLength;
    CompressedRow row;
    try {
      row = CompressedRow::from_parts(enc, head & 1, cols, std::move(payload));
    } catch (const Error& e) {
      fail(ErrorKind::Io, std::string("corrupt BitMat row: ") + e.what());
    }
    for (auto c : row.positions()) pairs.emplace_back(r, c);
  }
  bm = BitMat::from_pairs(static_cast<BitMatKind>(kind), slice, rows, cols, std::move(pairs));
  if (bm.triple_count() != count) fail(ErrorKind::Io, "BitMat triple count does not match header");
  return bm;
}

void TripleStore::save(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());

  std::ofstream dict(dir / "dict.tsv");
  if (!dict) fail(ErrorKind::Io, "cannot write " + (dir / "dict.tsv").string());
  const auto so = dict_.num_shared();
  for (std::uint32_t i = 1; i <= so; ++i) dict << i << '\t' << class_name(0) << '\t' << dict_.subject(i).to_ntriples() << '\n';
  for (std::uint32_t i = so + 1; i <= dict_.num_subjects(); ++i)
    dict << i << '\t' << class_name(1) << '\t' << dict_.subject(i).to_ntriples() << '\n';
  for (std::uint32_t i = so + 1; i <= dict_.num_objects(); ++i)
    dict << i << '\t' << class_name(2) << '\t' << dict_.object(i).to_ntriples() << '\n';
  for (std::uint32_t i = 1; i <= dict_.num_predicates(); ++i)
    dict << i << '\t' << class_name(3) << '\t' << dict_.predicate(i).to_ntriples() << '\n';
  if (!dict) fail(ErrorKind::Io, "write failed for dict.tsv");

  std::ofstream manifest(dir / "manifest.tsv");
  manifest << "triples\t" << triples_.size() << '\n';
  for (std::uint32_t p = 1; p <= dict_.num_predicates(); ++p) {
    auto name = "so_" + std::to_string(p) + ".bm";
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) fail(ErrorKind::Io, "cannot write " + (dir / name).string());
    write_bitmat(f, build(BitMatKind::SO, p));
    if (!f) fail(ErrorKind::Io, "write failed for " + name);
    manifest << "bitmat\t" << name << '\n';
  }
  if (!manifest) fail(ErrorKind::Io, "write failed for manifest.tsv");
}

TripleStore TripleStore::open(const std::filesystem::path& dir) {
  std::ifstream dict(dir / "dict.tsv");
  if (!dict) fail(ErrorKind::Io, "no store at " + dir.string());
  std::vector<Term> shared, subject_only, object_only, predicates;
  std::string line;
  std::size_t number = 0;
  while (std::getline(dict, line)) {
    ++number;
    if (line.empty()) continue;
    auto t1 = line.find('\t'), t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) fail(ErrorKind::Io, "dict.tsv line " + std::to_string(number) + " malformed");
    auto cls = line.substr(t1 + 1, t2 - t1 - 1);
    auto term = parse_stored_term(line.substr(t2 + 1), number);
    if (cls == "so") shared.push_back(term);
    else if (cls == "s") subject_only.push_back(term);
    else if (cls == "o") object_only.push_back(term);
    else if (cls == "p") predicates.push_back(term);
    else fail(ErrorKind::Io, "dict.tsv line " + std::to_string(number) + ": unknown class " + cls);
  }
  TripleStore st;
  auto so = static_cast<std::uint32_t>(shared.size());
  st.dict_ = Dictionary::from_tables(so, std::move(subject_only), std::move(object_only), std::move(shared), std::move(predicates));

  std::ifstream manifest(dir / "manifest.tsv");
  if (!manifest) fail(ErrorKind::Io, "missing manifest.tsv in " + dir.string());
  while (std::getline(manifest, line)) {
    if (!line.starts_with("bitmat\t")) continue;
    std::ifstream f(dir / line.substr(7), std::ios::binary);
    if (!f) fail(ErrorKind::Io, "missing " + line.substr(7));
    auto bm = read_bitmat(f);
    if (bm.kind() != BitMatKind::SO || bm.rows() != st.dict_.num_subjects() || bm.cols() != st.dict_.num_objects())
      fail(ErrorKind::Io, line.substr(7) + " does not match the dictionary");
    for (auto [s, o] : bm.pairs()) st.triples_.push_back({s, bm.slice(), o});
  }
  std::sort(st.triples_.begin(), st.triples_.end());
  st.index();
  return st;
}

}  // namespace bitopt
