//! In-memory indexes over the eight DBpedia datasets.
//!
//! A [`Store`] holds one language edition. Loading is single-writer: each
//! dataset file is streamed once and folded into the matching index. After
//! loading, stores are treated as frozen and read from many threads.
//!
//! All indexes are ordered maps so that snapshot bytes and derived outputs
//! do not depend on hash-iteration order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{parse_file, ParseOptions};
use crate::intern::{EntityId, InternTable};
use crate::linkgraph::LinkGraph;
use crate::ntriples::{Term, Triple};

/// The eight DBpedia dataset kinds consumed by the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatasetKind {
    InstanceTypes,
    ArticleCategories,
    SkosCategories,
    InfoboxProperties,
    MappingbasedProperties,
    PageLength,
    PageLinks,
    InterlanguageLinks,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 8] = [
        DatasetKind::InstanceTypes,
        DatasetKind::ArticleCategories,
        DatasetKind::SkosCategories,
        DatasetKind::InfoboxProperties,
        DatasetKind::MappingbasedProperties,
        DatasetKind::PageLength,
        DatasetKind::PageLinks,
        DatasetKind::InterlanguageLinks,
    ];

    /// The dump file stem, per the `<name>_<lang>.nt(.bz2)` convention.
    pub fn file_stem(self) -> &'static str {
        match self {
            DatasetKind::InstanceTypes => "instance_types",
            DatasetKind::ArticleCategories => "article_categories",
            DatasetKind::SkosCategories => "skos_categories",
            DatasetKind::InfoboxProperties => "infobox_properties",
            DatasetKind::MappingbasedProperties => "mappingbased_properties",
            DatasetKind::PageLength => "page_length",
            DatasetKind::PageLinks => "page_links",
            DatasetKind::InterlanguageLinks => "interlanguage_links",
        }
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|k| k.file_stem() == s)
            .ok_or_else(|| Error::UnknownDatasetKind(s.to_string()))
    }
}

/// Predicate IRIs that decide which triples are relevant to each dataset
/// kind. The 2014 defaults live in the pipeline config; nothing here is
/// hardcoded to a DBpedia release.
#[derive(Debug, Clone)]
pub struct DatasetPredicates {
    pub rdf_type: String,
    pub article_category: String,
    pub category_broader: String,
    pub category_label: String,
    pub page_link: String,
    pub page_length: String,
    pub interlanguage: String,
    pub occupation: String,
    pub birth: Vec<String>,
    pub death: Vec<String>,
    pub redirect: String,
}

/// Per-file load counters.
#[derive(Debug, Clone, Default)]
pub struct LoadStats {
    /// Triples read from the file.
    pub read: u64,
    /// Triples folded into the index.
    pub indexed: u64,
    /// Triples whose predicate (or value shape) is irrelevant to the kind.
    pub skipped: u64,
    /// Malformed lines recovered from.
    pub malformed: u64,
}

/// Multi-valued `(entity, predicate) → values` index. Multiplicity is
/// preserved: a predicate may repeat on the same entity.
#[derive(Debug, Clone, Default)]
pub struct PropertyIndex {
    map: BTreeMap<(EntityId, EntityId), Vec<Term>>,
}

impl PropertyIndex {
    fn insert(&mut self, entity: EntityId, predicate: EntityId, value: Term) {
        self.map.entry((entity, predicate)).or_default().push(value);
    }

    pub fn values(&self, entity: EntityId, predicate: EntityId) -> &[Term] {
        self.map
            .get(&(entity, predicate))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has(&self, entity: EntityId, predicate: EntityId) -> bool {
        self.map.contains_key(&(entity, predicate))
    }

    /// Iterates all entries with the given predicate.
    pub fn entries_with_predicate(
        &self,
        predicate: EntityId,
    ) -> impl Iterator<Item = (EntityId, &[Term])> {
        self.map
            .range((EntityId(0), predicate)..)
            .filter(move |((_, p), _)| *p == predicate)
            .map(|((e, _), v)| (*e, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = (&(EntityId, EntityId), &Vec<Term>)> {
        self.map.iter()
    }

    pub(crate) fn insert_raw(&mut self, key: (EntityId, EntityId), values: Vec<Term>) {
        self.map.insert(key, values);
    }
}

/// Queryable indexes for one language edition.
#[derive(Debug, Default)]
pub struct Store {
    pub lang: String,
    pub interner: InternTable,
    pub link_graph: Option<LinkGraph>,
    /// type → instances (sorted, duplicate-free).
    pub types: BTreeMap<EntityId, Vec<EntityId>>,
    /// article → categories.
    pub article_categories: BTreeMap<EntityId, Vec<EntityId>>,
    /// category → articles (inverse of the above).
    pub category_articles: BTreeMap<EntityId, Vec<EntityId>>,
    /// category → subcategories, oriented parent→child (from skos broader).
    pub category_children: BTreeMap<EntityId, Vec<EntityId>>,
    pub category_labels: BTreeMap<EntityId, String>,
    /// Raw infobox properties (occupation values, §4.3 uses these verbatim).
    pub infobox_props: PropertyIndex,
    /// Cleaned mapping-based properties (birth/death dates).
    pub mapped_props: PropertyIndex,
    /// English entity → language code → foreign entity (interned here).
    pub interlang: BTreeMap<EntityId, BTreeMap<String, EntityId>>,
    pub page_length: BTreeMap<EntityId, u64>,
    /// Entities present in the persondata input, when configured.
    pub persons: Option<BTreeSet<EntityId>>,
}

impl Store {
    pub fn new(lang: &str) -> Store {
        Store {
            lang: lang.to_string(),
            ..Store::default()
        }
    }

    /// Streams one dataset file into the matching index.
    pub fn load_dataset(
        &mut self,
        kind: DatasetKind,
        path: &Path,
        preds: &DatasetPredicates,
        opts: ParseOptions,
    ) -> Result<LoadStats> {
        let mut stats = LoadStats::default();
        match kind {
            DatasetKind::InstanceTypes => {
                let type_pred = self.interner.intern(&preds.rdf_type);
                let mut index = std::mem::take(&mut self.types);
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if t.predicate == type_pred {
                        if let Term::Iri(class) = t.object {
                            index.entry(class).or_default().push(t.subject);
                            stats.indexed += 1;
                            return;
                        }
                    }
                    stats.skipped += 1;
                })?;
                for instances in index.values_mut() {
                    instances.sort_unstable();
                    instances.dedup();
                }
                self.types = index;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::ArticleCategories => {
                let cat_pred = self.interner.intern(&preds.article_category);
                let mut fwd = std::mem::take(&mut self.article_categories);
                let mut rev = std::mem::take(&mut self.category_articles);
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if t.predicate == cat_pred {
                        if let Term::Iri(cat) = t.object {
                            fwd.entry(t.subject).or_default().push(cat);
                            rev.entry(cat).or_default().push(t.subject);
                            stats.indexed += 1;
                            return;
                        }
                    }
                    stats.skipped += 1;
                })?;
                for v in fwd.values_mut().chain(rev.values_mut()) {
                    v.sort_unstable();
                    v.dedup();
                }
                self.article_categories = fwd;
                self.category_articles = rev;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::SkosCategories => {
                let broader = self.interner.intern(&preds.category_broader);
                let label = self.interner.intern(&preds.category_label);
                let mut children = std::mem::take(&mut self.category_children);
                let mut labels = std::mem::take(&mut self.category_labels);
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if t.predicate == broader {
                        if let Term::Iri(parent) = t.object {
                            // `child broader parent`, stored parent→child.
                            children.entry(parent).or_default().push(t.subject);
                            stats.indexed += 1;
                            return;
                        }
                    } else if t.predicate == label {
                        if let Term::Literal { lexical, .. } = t.object {
                            labels.entry(t.subject).or_insert(lexical);
                            stats.indexed += 1;
                            return;
                        }
                    }
                    stats.skipped += 1;
                })?;
                for v in children.values_mut() {
                    v.sort_unstable();
                    v.dedup();
                }
                self.category_children = children;
                self.category_labels = labels;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::InfoboxProperties => {
                let keep: Vec<EntityId> =
                    vec![self.interner.intern(&preds.occupation)];
                let mut index = std::mem::take(&mut self.infobox_props);
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if keep.contains(&t.predicate) {
                        index.insert(t.subject, t.predicate, t.object);
                        stats.indexed += 1;
                    } else {
                        stats.skipped += 1;
                    }
                })?;
                self.infobox_props = index;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::MappingbasedProperties => {
                let keep: Vec<EntityId> = preds
                    .birth
                    .iter()
                    .chain(preds.death.iter())
                    .map(|p| self.interner.intern(p))
                    .collect();
                let mut index = std::mem::take(&mut self.mapped_props);
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if keep.contains(&t.predicate) {
                        index.insert(t.subject, t.predicate, t.object);
                        stats.indexed += 1;
                    } else {
                        stats.skipped += 1;
                    }
                })?;
                self.mapped_props = index;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::PageLength => {
                let len_pred = self.interner.intern(&preds.page_length);
                let mut index = std::mem::take(&mut self.page_length);
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if t.predicate == len_pred {
                        if let Term::Literal { ref lexical, .. } = t.object {
                            if let Ok(chars) = lexical.parse::<u64>() {
                                index.insert(t.subject, chars);
                                stats.indexed += 1;
                                return;
                            }
                        }
                    }
                    stats.skipped += 1;
                })?;
                self.page_length = index;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::PageLinks => {
                let link_pred = self.interner.intern(&preds.page_link);
                let mut edges: Vec<(u32, u32)> = Vec::new();
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if t.predicate == link_pred {
                        if let Term::Iri(target) = t.object {
                            edges.push((t.subject.0, target.0));
                            stats.indexed += 1;
                            return;
                        }
                    }
                    stats.skipped += 1;
                })?;
                self.link_graph = Some(LinkGraph::from_edges(self.interner.len(), edges));
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
            DatasetKind::InterlanguageLinks => {
                let same_as = self.interner.intern(&preds.interlanguage);
                let mut index = std::mem::take(&mut self.interlang);
                // Language extraction needs the interner, which the parse
                // closure borrows; buffer the pairs and resolve afterwards.
                let mut pending: Vec<(EntityId, EntityId)> = Vec::new();
                let pstats = parse_file(path, &mut self.interner, opts, |t| {
                    if t.predicate == same_as {
                        if let Term::Iri(foreign) = t.object {
                            pending.push((t.subject, foreign));
                            return;
                        }
                    }
                    stats.skipped += 1;
                })?;
                for (subject, foreign) in pending {
                    match language_of_dbpedia_iri(self.interner.resolve(foreign)) {
                        Some(lang) => {
                            let per_lang = index.entry(subject).or_default();
                            // At most one foreign article per (entity, language).
                            if per_lang.contains_key(&lang) {
                                stats.skipped += 1;
                            } else {
                                per_lang.insert(lang, foreign);
                                stats.indexed += 1;
                            }
                        }
                        None => stats.skipped += 1,
                    }
                }
                self.interlang = index;
                stats.read = pstats.triples;
                stats.malformed = pstats.malformed;
            }
        }
        log::debug!(
            "loaded {} for `{}`: {} read, {} indexed, {} skipped, {} malformed",
            kind.file_stem(),
            self.lang,
            stats.read,
            stats.indexed,
            stats.skipped,
            stats.malformed
        );
        Ok(stats)
    }

    /// Loads the persondata input: every distinct subject becomes a person.
    pub fn load_person_set(&mut self, path: &Path, opts: ParseOptions) -> Result<LoadStats> {
        let mut stats = LoadStats::default();
        let mut persons = self.persons.take().unwrap_or_default();
        let pstats = parse_file(path, &mut self.interner, opts, |t| {
            persons.insert(t.subject);
            stats.indexed += 1;
        })?;
        self.persons = Some(persons);
        stats.read = pstats.triples;
        stats.malformed = pstats.malformed;
        Ok(stats)
    }

    pub fn link_graph(&self) -> Option<&LinkGraph> {
        self.link_graph.as_ref()
    }

    pub fn in_degree(&self, entity: EntityId) -> u32 {
        self.link_graph
            .as_ref()
            .map(|g| g.in_degree(entity))
            .unwrap_or(0)
    }

    /// Instances of a type IRI; `None` when the type never occurs.
    pub fn instances_of(&self, type_iri: &str) -> Option<&[EntityId]> {
        let id = self.interner.get(type_iri)?;
        self.types.get(&id).map(Vec::as_slice)
    }

    pub fn iri(&self, id: EntityId) -> &str {
        self.interner.resolve(id)
    }
}

/// Extracts the language code from a DBpedia resource IRI:
/// `http://de.dbpedia.org/resource/X` → `de`, the English edition has no
/// subdomain. Non-DBpedia IRIs (other sameAs targets) yield `None`.
pub fn language_of_dbpedia_iri(iri: &str) -> Option<String> {
    let rest = iri
        .strip_prefix("http://")
        .or_else(|| iri.strip_prefix("https://"))?;
    let host = rest.split('/').next()?;
    if host == "dbpedia.org" {
        Some("en".to_string())
    } else {
        host.strip_suffix(".dbpedia.org")
            .filter(|code| !code.is_empty() && !code.contains('.'))
            .map(str::to_string)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::io::Write;

    pub(crate) fn test_predicates() -> DatasetPredicates {
        DatasetPredicates {
            rdf_type: "http://www.w3.org/1999/02/22-rdf-syntax-ns#type".into(),
            article_category: "http://purl.org/dc/terms/subject".into(),
            category_broader: "http://www.w3.org/2004/02/skos/core#broader".into(),
            category_label: "http://www.w3.org/2004/02/skos/core#prefLabel".into(),
            page_link: "http://dbpedia.org/ontology/wikiPageWikiLink".into(),
            page_length: "http://dbpedia.org/ontology/wikiPageLength".into(),
            interlanguage: "http://www.w3.org/2002/07/owl#sameAs".into(),
            occupation: "http://dbpedia.org/property/occupation".into(),
            birth: vec![
                "http://dbpedia.org/ontology/birthDate".into(),
                "http://dbpedia.org/ontology/birthYear".into(),
            ],
            death: vec![
                "http://dbpedia.org/ontology/deathDate".into(),
                "http://dbpedia.org/ontology/deathYear".into(),
            ],
            redirect: "http://dbpedia.org/ontology/wikiPageRedirects".into(),
        }
    }

    fn write_temp(content: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.nt");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(content.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn page_links_in_degree() {
        let (_d, path) = write_temp(
            "<http://r/A> <http://dbpedia.org/ontology/wikiPageWikiLink> <http://r/B> .\n\
             <http://r/C> <http://dbpedia.org/ontology/wikiPageWikiLink> <http://r/B> .\n",
        );
        let mut store = Store::new("en");
        let stats = store
            .load_dataset(
                DatasetKind::PageLinks,
                &path,
                &test_predicates(),
                ParseOptions::default(),
            )
            .unwrap();
        assert_eq!(stats.indexed, 2);
        let b = store.interner.get("http://r/B").unwrap();
        assert_eq!(store.in_degree(b), 2);
    }

    #[test]
    fn instance_types_index() {
        let (_d, path) = write_temp(
            "<http://r/A> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://o/Writer> .\n\
             <http://r/A> <http://other/pred> <http://o/Noise> .\n",
        );
        let mut store = Store::new("en");
        let stats = store
            .load_dataset(
                DatasetKind::InstanceTypes,
                &path,
                &test_predicates(),
                ParseOptions::default(),
            )
            .unwrap();
        assert_eq!(stats.indexed, 1);
        assert_eq!(stats.skipped, 1);
        let instances = store.instances_of("http://o/Writer").unwrap();
        assert_eq!(instances.len(), 1);
        assert_eq!(store.iri(instances[0]), "http://r/A");
    }

    #[test]
    fn page_length_rejects_bad_values() {
        let (_d, path) = write_temp(
            "<http://r/A> <http://dbpedia.org/ontology/wikiPageLength> \"5000\"^^<http://www.w3.org/2001/XMLSchema#nonNegativeInteger> .\n\
             <http://r/B> <http://dbpedia.org/ontology/wikiPageLength> \"-3\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n\
             <http://r/C> <http://dbpedia.org/ontology/wikiPageLength> \"soon\" .\n",
        );
        let mut store = Store::new("en");
        let stats = store
            .load_dataset(
                DatasetKind::PageLength,
                &path,
                &test_predicates(),
                ParseOptions::default(),
            )
            .unwrap();
        assert_eq!(stats.indexed, 1);
        assert_eq!(stats.skipped, 2);
        let a = store.interner.get("http://r/A").unwrap();
        assert_eq!(store.page_length.get(&a), Some(&5000));
    }

    #[test]
    fn interlanguage_links_extract_language() {
        let (_d, path) = write_temp(
            "<http://dbpedia.org/resource/A> <http://www.w3.org/2002/07/owl#sameAs> <http://de.dbpedia.org/resource/A_de> .\n\
             <http://dbpedia.org/resource/A> <http://www.w3.org/2002/07/owl#sameAs> <http://de.dbpedia.org/resource/A_dup> .\n\
             <http://dbpedia.org/resource/A> <http://www.w3.org/2002/07/owl#sameAs> <http://rdf.freebase.com/ns/m.0abc> .\n",
        );
        let mut store = Store::new("en");
        let stats = store
            .load_dataset(
                DatasetKind::InterlanguageLinks,
                &path,
                &test_predicates(),
                ParseOptions::default(),
            )
            .unwrap();
        assert_eq!(stats.indexed, 1);
        assert_eq!(stats.skipped, 2); // duplicate (entity, lang) + freebase
        let a = store.interner.get("http://dbpedia.org/resource/A").unwrap();
        let langs = store.interlang.get(&a).unwrap();
        assert_eq!(langs.len(), 1);
        assert_eq!(
            store.iri(langs["de"]),
            "http://de.dbpedia.org/resource/A_de"
        );
    }

    #[test]
    fn language_extraction_rules() {
        assert_eq!(
            language_of_dbpedia_iri("http://dbpedia.org/resource/X"),
            Some("en".into())
        );
        assert_eq!(
            language_of_dbpedia_iri("http://pt.dbpedia.org/resource/X"),
            Some("pt".into())
        );
        assert_eq!(language_of_dbpedia_iri("http://rdf.freebase.com/ns/x"), None);
        assert_eq!(language_of_dbpedia_iri("urn:isbn:123"), None);
    }

    #[test]
    fn property_multiplicity_is_preserved() {
        let (_d, path) = write_temp(
            "<http://r/A> <http://dbpedia.org/property/occupation> \"Poet\"@en .\n\
             <http://r/A> <http://dbpedia.org/property/occupation> \"Critic\"@en .\n",
        );
        let mut store = Store::new("en");
        store
            .load_dataset(
                DatasetKind::InfoboxProperties,
                &path,
                &test_predicates(),
                ParseOptions::default(),
            )
            .unwrap();
        let a = store.interner.get("http://r/A").unwrap();
        let occ = store
            .interner
            .get("http://dbpedia.org/property/occupation")
            .unwrap();
        assert_eq!(store.infobox_props.values(a, occ).len(), 2);
    }
}
