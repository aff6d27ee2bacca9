#include "depsem/conllu.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "depsem/error.hpp"

namespace depsem {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(start));
      break;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cols;
}

bool parse_size(const std::string& s, std::size_t& out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

void read_comment(const std::string& line, SentenceParse& s) {
  auto value_of = [&](const std::string& key, std::string& dst) {
    const std::string prefix = "# " + key + " =";
    if (line.rfind(prefix, 0) == 0) {
      std::string v = line.substr(prefix.size());
      if (!v.empty() && v.front() == ' ') v.erase(0, 1);
      dst = v;
    }
  };
  value_of("text", s.text);
  value_of("sent_id", s.sent_id);
}

}  // namespace

std::vector<std::string> SentenceParse::forms() const {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(w.form);
  return out;
}

std::size_t SentenceParse::root() const {
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i].head == 0) return i;
  }
  throw ParseError(first_line, "sentence has no root");
}

void validate_tree(const SentenceParse& s) {
  const std::size_t n = s.words.size();
  if (n == 0) throw ParseError(s.first_line, "empty sentence");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const WordToken& w = s.words[i];
    if (w.index != i + 1) {
      throw ParseError(w.line, "word ids must be 1..n in order; expected " +
                                   std::to_string(i + 1) + ", got " + std::to_string(w.index));
    }
    if (w.head > n) {
      throw ParseError(w.line, "HEAD " + std::to_string(w.head) + " out of range for " +
                                   std::to_string(n) + " words");
    }
    if (w.head == w.index) throw ParseError(w.line, "word " + std::to_string(w.index) + " heads itself");
    if (w.deprel.empty()) throw ParseError(w.line, "empty DEPREL");
    if (w.head == 0 && ++roots > 1) throw ParseError(w.line, "multiple roots in sentence");
  }
  if (roots == 0) throw ParseError(s.first_line, "sentence has no root");

  // Walk each word's head chain; a chain longer than n revisits a node.
  // state: 0 unvisited, 1 on the current chain, 2 known to reach the root
  std::vector<int> state(n + 1, 0);
  state[0] = 2;
  for (std::size_t start = 1; start <= n; ++start) {
    std::vector<std::size_t> chain;
    std::size_t cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      chain.push_back(cur);
      cur = s.words[cur - 1].head;
    }
    if (state[cur] == 1) {
      throw ParseError(s.words[cur - 1].line,
                       "cycle in head links through word " + std::to_string(cur));
    }
    for (auto c : chain) state[c] = 2;
  }
}

std::vector<SentenceParse> parse_conllu(std::istream& in) {
  std::vector<SentenceParse> out;
  SentenceParse cur;
  bool open = false;
  std::string line;
  std::size_t lineno = 0;

  auto flush = [&]() {
    if (open && !cur.words.empty()) {
      validate_tree(cur);
      out.push_back(std::move(cur));
    }
    cur = SentenceParse{};
    open = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      cur.first_line = lineno;
    }
    if (line[0] == '#') {
      read_comment(line, cur);
      continue;
    }
    auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw ParseError(lineno, "expected 10 tab-separated columns, got " + std::to_string(cols.size()));
    }
    const std::string& id = cols[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) continue;

    WordToken w;
    if (!parse_size(id, w.index)) throw ParseError(lineno, "non-integer ID '" + id + "'");
    if (!parse_size(cols[6], w.head)) throw ParseError(lineno, "non-integer HEAD '" + cols[6] + "'");
    w.form = cols[1];
    w.lemma = cols[2];
    w.upos = cols[3];
    w.xpos = cols[4];
    w.feats = cols[5];
    w.deprel = cols[7];
    w.deps = cols[8];
    w.misc = cols[9];
    w.line = lineno;
    cur.words.push_back(std::move(w));
  }
  flush();
  return out;
}

std::vector<SentenceParse> parse_conllu_string(const std::string& text) {
  std::istringstream in(text);
  return parse_conllu(in);
}

std::vector<SentenceParse> read_conllu(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return parse_conllu(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path.string());
  }
}

void write_conllu(std::ostream& out, const std::vector<SentenceParse>& sentences) {
  for (const auto& s : sentences) {
    if (!s.sent_id.empty()) out << "# sent_id = " << s.sent_id << '\n';
    if (!s.text.empty()) out << "# text = " << s.text << '\n';
    for (const auto& w : s.words) {
      out << w.index << '\t' << w.form << '\t' << w.lemma << '\t' << w.upos << '\t' << w.xpos
          << '\t' << w.feats << '\t' << w.head << '\t' << w.deprel << '\t' << w.deps << '\t'
          << w.misc << '\n';
    }
    out << '\n';
  }
}

std::string to_conllu_string(const std::vector<SentenceParse>& sentences) {
  std::ostringstream out;
  write_conllu(out, sentences);
  return out.str();
}

}  // namespace depsem
