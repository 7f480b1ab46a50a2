#include <algorithm>
#include <charconv>
#include <regex>
#include <stdexcept>
#include <string>

#include "biaslex/corpus.hpp"
#include "biaslex/error.hpp"

namespace biaslex {
namespace {

const std::set<std::string> kGender = {"masc", "fem", "masc_trans", "fem_trans"};

// Initials such as "JS" or "J.S.", optionally lowercase.
constexpr const char* kInitialsPattern = R"([A-Za-z](\.?[A-Za-z])*\.?)";
constexpr const char* kCaseNumberPattern = R"(\d{7}-\d{2}\.\d{4}\.8\.26\.\d{4})";
constexpr const char* kDatePattern = R"(\d{4}-\d{2}-\d{2})";

AttributeSchema categorical(std::string name, std::set<std::string> values, bool multi = false,
                            bool prej = false) {
  AttributeSchema s;
  s.name = std::move(name);
  s.kind = multi ? AttributeKind::multi_categorical : AttributeKind::categorical;
  s.allowed_values = std::move(values);
  s.multi_valued = multi;
  s.allows_prej = prej;
  return s;
}

AttributeSchema numeric(std::string name, double lo, double hi, std::set<std::string> labels = {},
                        bool prej = false) {
  AttributeSchema s;
  s.name = std::move(name);
  s.kind = AttributeKind::numeric_range;
  s.range = NumericRange{lo, hi};
  s.allowed_values = std::move(labels);
  s.allows_prej = prej;
  return s;
}

AttributeSchema free_text(std::string name, bool multi = false, bool prej = false) {
  AttributeSchema s;
  s.name = std::move(name);
  s.kind = AttributeKind::free_text;
  s.multi_valued = multi;
  s.allows_prej = prej;
  return s;
}

AttributeSchema identifier(std::string name, std::string pattern, std::set<std::string> literals = {},
                           bool multi = false) {
  AttributeSchema s;
  s.name = std::move(name);
  s.kind = AttributeKind::identifier;
  s.pattern = std::move(pattern);
  s.allowed_values = std::move(literals);
  s.multi_valued = multi;
  return s;
}

std::vector<AttributeSchema> dvc_schema() {
  return {
      identifier("apelante", kInitialsPattern, {"mpsp"}, true),
      categorical("apelante_genero", kGender),
      identifier("apelado", kInitialsPattern, {"mpsp"}, true),
      categorical("crime",
                  {"cp129p6", "cp129p9", "cp147", "cp150p1", "cp330", "cp331", "cp345", "ct306",
                   "lcp21", "lcp65"},
                  true),
      categorical("vitima",
                  {"comp", "esposa", "namo", "ex", "fam_ex", "rel_ex", "filha", "ent", "irma",
                   "irmao", "sob", "cnh", "mae", "pai", "tia", "amiga"},
                  true),
      categorical("vitima_genero", kGender, true),
      numeric("pena_original", 0.0, 23.5),
      categorical("requer",
                  {"abs", "cond", "abrand", "desclass", "cond_sem_qual", "afast_altern", "maj",
                   "conc_mat"},
                  true),
      categorical("requer_subsid", {"abrand", "desclass", "afast_sursis"}, true),
      categorical("requer_motivo",
                  {"provas", "aut_mater", "insig", "atip", "aus_dolo", "leg_def", "conf",
                   "cp129p4", "inimputab", "fato", "jur", "vit", "antec", "n_antec"},
                  true),
      categorical("mp_pj", {"s", "n", "parcial"}, true, true),
      categorical("resultado", {"s", "n", "parcial"}),
      categorical("resultado_razoes",
                  {"provas", "aut_mater", "fund_legal", "bis_in_idem", "jur", "vit", "conf",
                   "n_antec", "imputab", "leg_def", "circ", "presc"},
                  true, true),
      numeric("pena_atual", 0.0, 15.17, {"idem", "sursis", "sem_sursis", "abrand_reg", "sem_serv"},
              true),
      free_text("vies", true),
      categorical("vies_alvo", {"vitima", "reu", "test", "abs_mul", "abs_reu", "soc"}, true),
  };
}

std::vector<AttributeSchema> pac_schema() {
  return {
      identifier("processo", kCaseNumberPattern),
      free_text("relator"),
      free_text("orgao_julgador"),
      identifier("data_julgamento", kDatePattern),
      categorical("tipo_recurso",
                  {"apelacao_criminal", "habeas_corpus_criminal", "apelacao_civel",
                   "agravo_de_instrumento", "embargos_de_declaracao_criminal",
                   "recurso_em_sentido_estrito", "carta_testemunhavel",
                   "embargos_de_declaracao_civel", "embargos_infringentes",
                   "embargos_infringentes_e_de_nulidade", "agravo_regimental_civel"}),
      categorical("colegialidade", {"acordao", "decisao_monocratica"}),
      categorical("inteiro_teor", {"available"}),
      categorical("assunto",
                  {"atentado_ao_pudor", "visita", "violencia_domestica", "estupro", "guarda",
                   "dissolucao", "danos_morais", "suprimento_de_consentimento", "guarda_e_visita",
                   "alimentos_e_dissolucao", "alienacao_parental", "divorcio", "ameaca",
                   "maus_tratos", "destituicao_do_poder_familiar", "doacao", "alimentos_e_guarda",
                   "busca_e_apreensao", "danos_morais_e_materiais"}),
      categorical("alegou_ap",
                  {"genitor", "genitora", "ex-companheiro_pai_que_nao_e_genitor", "ambos"}),
      categorical("acusado_ap",
                  {"genitor", "genitora", "ambos", "agravada", "perita", "avo_materna",
                   "avos_paternos", "atual_companheiro_da_genitora", "genitora_e_sogra"}),
      categorical("viol_mulher",
                  {"agressao", "lesao_corporal", "existencia_de_medida_protetiva",
                   "ameaca_e_agressao"},
                  true),
      categorical("viol_menor",
                  {"abuso_sexual", "ameaca_e_abuso_sexual", "maus_tratos_e_abuso_sexual",
                   "acusacao_anterior_de_abuso_sexual", "lesao_corporal", "agressao"},
                  true),
      categorical("acusado_viol",
                  {"genitor", "madrasta", "companheiro_da_genitora", "ex-companheiro_da_genitora",
                   "companheira_do_genitor", "pai_adotivo", "filho_da_companheira_do_genitor",
                   "rapazes_que_moram_com_a_genitora", "esposo_da_avo_materna_e_pai_da_genitora",
                   "ambos"}),
      categorical("resultado_viol", {"sim", "nao", "indicios"}),
      categorical("prova_viol",
                  {"in_dubio_pro_reo", "estudo_psicossocial", "exame_iml", "pericia",
                   "estudo_psicologico", "exame", "necessidade_de_instrucao_probatoria",
                   "arquivamento_do_inquerito_policial", "rejeicao_da_denuncia",
                   "processo_penal_arquivado", "nao_houve_oferecimento_da_denuncia",
                   "condenacao_criminal", "conselho_tutelar"},
                  true),
      categorical("resultado_ap",
                  {"alienacao_parental_evidenciada", "sindrome_da_alienacao_parental_evidenciada",
                   "nao_ocorrencia", "nao_ocorrencia_sindrome", "indicios_de_alienacao_parental",
                   "necessidade_de_instrucao_probatoria", "materia_estranha_ao_processo",
                   "existencia_de_acao_declaratoria_de_alienacao_parental",
                   "citacao_de_jurisprudencia_pelo_tribunal"}),
      categorical("prova_ap",
                  {"estudo_psicossocial", "estudo_psicologico", "pericia", "prova_emprestada",
                   "em_outro_processo"},
                  true),
      free_text("vies", true, true),
      categorical("vies_alvo", {"vitima", "mae", "mul", "soc", "abs_mul", "abs_reu", "abs_cri"},
                  true, true),
  };
}

bool parse_number(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

void check_value(const Decision& d, const AttributeSchema& schema, const std::string& value,
                 std::vector<Violation>& out) {
  auto add = [&](ViolationRule rule) { out.push_back({d.id, schema.name, value, rule}); };
  if (value.empty()) {
    if (!schema.allows_empty) add(ViolationRule::out_of_domain);
    return;
  }
  if (value == kPrejValue) {
    if (!schema.allows_prej) add(ViolationRule::prej_not_allowed);
    return;
  }
  switch (schema.kind) {
    case AttributeKind::categorical:
    case AttributeKind::multi_categorical:
      if (!schema.allowed_values.contains(value)) add(ViolationRule::out_of_domain);
      return;
    case AttributeKind::numeric_range: {
      if (schema.allowed_values.contains(value)) return;
      double x = 0.0;
      if (!parse_number(value, x)) {
        add(ViolationRule::malformed_number);
        return;
      }
      if (schema.range && (x < schema.range->lo || x > schema.range->hi)) {
        add(ViolationRule::out_of_range);
      }
      return;
    }
    case AttributeKind::identifier: {
      if (schema.allowed_values.contains(value)) return;
      if (!std::regex_match(value, std::regex(schema.pattern))) add(ViolationRule::pattern_mismatch);
      return;
    }
    case AttributeKind::free_text:
      return;
  }
}

}  // namespace

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::categorical: return "categorical";
    case AttributeKind::multi_categorical: return "multi_categorical";
    case AttributeKind::numeric_range: return "numeric_range";
    case AttributeKind::free_text: return "free_text";
    case AttributeKind::identifier: return "identifier";
  }
  return "?";
}

std::string_view to_string(ViolationRule rule) {
  switch (rule) {
    case ViolationRule::unknown_attribute: return "unknown_attribute";
    case ViolationRule::out_of_domain: return "out_of_domain";
    case ViolationRule::out_of_range: return "out_of_range";
    case ViolationRule::malformed_number: return "malformed_number";
    case ViolationRule::pattern_mismatch: return "pattern_mismatch";
    case ViolationRule::prej_not_allowed: return "prej_not_allowed";
    case ViolationRule::too_many_values: return "too_many_values";
    case ViolationRule::bad_bias_category: return "bad_bias_category";
    case ViolationRule::empty_statement: return "empty_statement";
  }
  return "?";
}

std::string format_violation(const Violation& v) {
  return v.decision_id + "\t" + v.attribute + "\t\"" + v.value + "\"\t" +
         std::string(to_string(v.rule));
}

std::vector<AttributeSchema> build_schema(DatasetTag tag) {
  return tag == DatasetTag::DVC ? dvc_schema() : pac_schema();
}

std::vector<Violation> validate_decision(const Decision& d,
                                         const std::vector<AttributeSchema>& schema) {
  std::vector<Violation> out;
  for (const auto& [name, values] : d.attributes) {
    const auto it = std::find_if(schema.begin(), schema.end(),
                                 [&](const AttributeSchema& s) { return s.name == name; });
    if (it == schema.end()) {
      out.push_back({d.id, name, values.empty() ? "" : values.front(),
                     ViolationRule::unknown_attribute});
      continue;
    }
    if (values.size() > 1 && !it->multi_valued) {
      out.push_back({d.id, name, values[1], ViolationRule::too_many_values});
    }
    for (const auto& v : values) check_value(d, *it, v, out);
  }
  for (const auto& span : d.bias_spans) {
    if (span.statement.empty()) {
      out.push_back({d.id, "bias_spans", "", ViolationRule::empty_statement});
    }
    if (!category_valid_for(span.category, d.dataset_tag)) {
      out.push_back({d.id, "bias_spans", std::string(to_string(span.category)),
                     ViolationRule::bad_bias_category});
    }
  }
  return out;
}

}  // namespace biaslex
