//! Versioned binary store snapshots.
//!
//! Re-parsing the dumps dominates iteration time, so a loaded [`Store`] can
//! be persisted to a little-endian binary file and reloaded in seconds. The
//! format is a fixed header (magic, version, language, source fingerprint)
//! followed by tagged sections, one per index. A version bump invalidates
//! old snapshots explicitly instead of misreading them.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::intern::{EntityId, InternTable};
use crate::linkgraph::LinkGraph;
use crate::ntriples::Term;
use crate::store::{PropertyIndex, Store};

const MAGIC: &[u8; 8] = b"LITSNAP\0";
const VERSION: u32 = 1;

const SEC_INTERNER: u8 = 1;
const SEC_LINK_GRAPH: u8 = 2;
const SEC_TYPES: u8 = 3;
const SEC_ARTICLE_CATS: u8 = 4;
const SEC_CAT_ARTICLES: u8 = 5;
const SEC_CAT_CHILDREN: u8 = 6;
const SEC_CAT_LABELS: u8 = 7;
const SEC_PROPS_RAW: u8 = 8;
const SEC_PROPS_MAPPED: u8 = 9;
const SEC_INTERLANG: u8 = 10;
const SEC_PAGE_LENGTH: u8 = 11;
const SEC_PERSONS: u8 = 12;
const SEC_END: u8 = 0xFF;

/// Writes `store` to `path`. The fingerprint identifies the source files the
/// store was built from, so reruns can detect reusable snapshots.
pub fn snapshot_save(store: &Store, fingerprint: &str, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    (|| -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(VERSION)?;
        write_string(&mut w, &store.lang)?;
        write_string(&mut w, fingerprint)?;

        write_section(&mut w, SEC_INTERNER, |buf| {
            buf.write_u64::<LittleEndian>(store.interner.len() as u64)?;
            for (_, iri) in store.interner.iter() {
                write_string(buf, iri)?;
            }
            Ok(())
        })?;

        if let Some(graph) = store.link_graph() {
            write_section(&mut w, SEC_LINK_GRAPH, |buf| {
                let (offsets, targets, in_degree) = graph.raw_parts();
                write_u64_slice(buf, offsets)?;
                write_u32_slice(buf, targets)?;
                write_u32_slice(buf, in_degree)?;
                Ok(())
            })?;
        }

        write_id_map_section(&mut w, SEC_TYPES, &store.types)?;
        write_id_map_section(&mut w, SEC_ARTICLE_CATS, &store.article_categories)?;
        write_id_map_section(&mut w, SEC_CAT_ARTICLES, &store.category_articles)?;
        write_id_map_section(&mut w, SEC_CAT_CHILDREN, &store.category_children)?;

        write_section(&mut w, SEC_CAT_LABELS, |buf| {
            buf.write_u64::<LittleEndian>(store.category_labels.len() as u64)?;
            for (id, label) in &store.category_labels {
                buf.write_u32::<LittleEndian>(id.0)?;
                write_string(buf, label)?;
            }
            Ok(())
        })?;

        write_props_section(&mut w, SEC_PROPS_RAW, &store.infobox_props)?;
        write_props_section(&mut w, SEC_PROPS_MAPPED, &store.mapped_props)?;

        write_section(&mut w, SEC_INTERLANG, |buf| {
            buf.write_u64::<LittleEndian>(store.interlang.len() as u64)?;
            for (id, langs) in &store.interlang {
                buf.write_u32::<LittleEndian>(id.0)?;
                buf.write_u32::<LittleEndian>(langs.len() as u32)?;
                for (lang, foreign) in langs {
                    write_string(buf, lang)?;
                    buf.write_u32::<LittleEndian>(foreign.0)?;
                }
            }
            Ok(())
        })?;

        write_section(&mut w, SEC_PAGE_LENGTH, |buf| {
            buf.write_u64::<LittleEndian>(store.page_length.len() as u64)?;
            for (id, chars) in &store.page_length {
                buf.write_u32::<LittleEndian>(id.0)?;
                buf.write_u64::<LittleEndian>(*chars)?;
            }
            Ok(())
        })?;

        if let Some(persons) = &store.persons {
            write_section(&mut w, SEC_PERSONS, |buf| {
                buf.write_u64::<LittleEndian>(persons.len() as u64)?;
                for id in persons {
                    buf.write_u32::<LittleEndian>(id.0)?;
                }
                Ok(())
            })?;
        }

        w.write_u8(SEC_END)?;
        w.flush()
    })()
    .map_err(|e| Error::io(path, e))
}

/// Reads a snapshot back. Returns the store and the fingerprint it was saved
/// with.
pub fn snapshot_load(path: &Path) -> Result<(Store, String)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let (lang, fingerprint) = read_header(&mut r, path)?;

    let mut store = Store::new(&lang);
    let corrupt = |what: &str| Error::Snapshot(format!("{}: corrupt {what}", path.display()));

    loop {
        let tag = r.read_u8().map_err(|_| corrupt("section tag"))?;
        if tag == SEC_END {
            break;
        }
        let len = r
            .read_u64::<LittleEndian>()
            .map_err(|_| corrupt("section length"))?;
        let mut payload = vec![0u8; len as usize];
        r.read_exact(&mut payload)
            .map_err(|_| corrupt("section payload"))?;
        let mut buf = io::Cursor::new(payload);
        let res: io::Result<()> = (|| {
            match tag {
                SEC_INTERNER => {
                    let n = buf.read_u64::<LittleEndian>()?;
                    let mut table = InternTable::new();
                    for _ in 0..n {
                        table.intern(&read_string(&mut buf)?);
                    }
                    store.interner = table;
                }
                SEC_LINK_GRAPH => {
                    let offsets = read_u64_vec(&mut buf)?;
                    let targets = read_u32_vec(&mut buf)?;
                    let in_degree = read_u32_vec(&mut buf)?;
                    store.link_graph =
                        Some(LinkGraph::from_raw_parts(offsets, targets, in_degree));
                }
                SEC_TYPES => store.types = read_id_map(&mut buf)?,
                SEC_ARTICLE_CATS => store.article_categories = read_id_map(&mut buf)?,
                SEC_CAT_ARTICLES => store.category_articles = read_id_map(&mut buf)?,
                SEC_CAT_CHILDREN => store.category_children = read_id_map(&mut buf)?,
                SEC_CAT_LABELS => {
                    let n = buf.read_u64::<LittleEndian>()?;
                    let mut map = BTreeMap::new();
                    for _ in 0..n {
                        let id = EntityId(buf.read_u32::<LittleEndian>()?);
                        map.insert(id, read_string(&mut buf)?);
                    }
                    store.category_labels = map;
                }
                SEC_PROPS_RAW => store.infobox_props = read_props(&mut buf)?,
                SEC_PROPS_MAPPED => store.mapped_props = read_props(&mut buf)?,
                SEC_INTERLANG => {
                    let n = buf.read_u64::<LittleEndian>()?;
                    let mut map = BTreeMap::new();
                    for _ in 0..n {
                        let id = EntityId(buf.read_u32::<LittleEndian>()?);
                        let m = buf.read_u32::<LittleEndian>()?;
                        let mut langs = BTreeMap::new();
                        for _ in 0..m {
                            let lang = read_string(&mut buf)?;
                            langs.insert(lang, EntityId(buf.read_u32::<LittleEndian>()?));
                        }
                        map.insert(id, langs);
                    }
                    store.interlang = map;
                }
                SEC_PAGE_LENGTH => {
                    let n = buf.read_u64::<LittleEndian>()?;
                    let mut map = BTreeMap::new();
                    for _ in 0..n {
                        let id = EntityId(buf.read_u32::<LittleEndian>()?);
                        map.insert(id, buf.read_u64::<LittleEndian>()?);
                    }
                    store.page_length = map;
                }
                SEC_PERSONS => {
                    let n = buf.read_u64::<LittleEndian>()?;
                    let mut set = BTreeSet::new();
                    for _ in 0..n {
                        set.insert(EntityId(buf.read_u32::<LittleEndian>()?));
                    }
                    store.persons = Some(set);
                }
                other => {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("unknown section tag {other}"),
                    ))
                }
            }
            Ok(())
        })();
        res.map_err(|e| Error::Snapshot(format!("{}: {e}", path.display())))?;
    }
    Ok((store, fingerprint))
}

/// Reads only the header, for cheap snapshot-reuse checks.
pub fn snapshot_fingerprint(path: &Path) -> Result<String> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let (_, fingerprint) = read_header(&mut r, path)?;
    Ok(fingerprint)
}

fn read_header(r: &mut impl Read, path: &Path) -> Result<(String, String)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Snapshot(format!("{}: file too short", path.display())))?;
    if &magic != MAGIC {
        return Err(Error::Snapshot(format!(
            "{}: not a snapshot file",
            path.display()
        )));
    }
    let version = r
        .read_u32::<LittleEndian>()
        .map_err(|_| Error::Snapshot(format!("{}: truncated header", path.display())))?;
    if version != VERSION {
        return Err(Error::SnapshotVersion {
            found: version,
            expected: VERSION,
        });
    }
    let lang = read_string(r)
        .map_err(|_| Error::Snapshot(format!("{}: truncated header", path.display())))?;
    let fingerprint = read_string(r)
        .map_err(|_| Error::Snapshot(format!("{}: truncated header", path.display())))?;
    Ok((lang, fingerprint))
}

fn write_section<W: Write>(
    w: &mut W,
    tag: u8,
    fill: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
) -> io::Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    w.write_u8(tag)?;
    w.write_u64::<LittleEndian>(buf.len() as u64)?;
    w.write_all(&buf)
}

fn write_id_map_section<W: Write>(
    w: &mut W,
    tag: u8,
    map: &BTreeMap<EntityId, Vec<EntityId>>,
) -> io::Result<()> {
    write_section(w, tag, |buf| {
        buf.write_u64::<LittleEndian>(map.len() as u64)?;
        for (id, ids) in map {
            buf.write_u32::<LittleEndian>(id.0)?;
            buf.write_u32::<LittleEndian>(ids.len() as u32)?;
            for x in ids {
                buf.write_u32::<LittleEndian>(x.0)?;
            }
        }
        Ok(())
    })
}

fn read_id_map(r: &mut impl Read) -> io::Result<BTreeMap<EntityId, Vec<EntityId>>> {
    let n = r.read_u64::<LittleEndian>()?;
    let mut map = BTreeMap::new();
    for _ in 0..n {
        let id = EntityId(r.read_u32::<LittleEndian>()?);
        let m = r.read_u32::<LittleEndian>()?;
        let mut ids = Vec::with_capacity(m as usize);
        for _ in 0..m {
            ids.push(EntityId(r.read_u32::<LittleEndian>()?));
        }
        map.insert(id, ids);
    }
    Ok(map)
}

fn write_props_section<W: Write>(w: &mut W, tag: u8, props: &PropertyIndex) -> io::Result<()> {
    write_section(w, tag, |buf| {
        buf.write_u64::<LittleEndian>(props.len() as u64)?;
        for ((entity, pred), values) in props.iter() {
            buf.write_u32::<LittleEndian>(entity.0)?;
            buf.write_u32::<LittleEndian>(pred.0)?;
            buf.write_u32::<LittleEndian>(values.len() as u32)?;
            for term in values {
                write_term(buf, term)?;
            }
        }
        Ok(())
    })
}

fn read_props(r: &mut impl Read) -> io::Result<PropertyIndex> {
    let n = r.read_u64::<LittleEndian>()?;
    let mut props = PropertyIndex::default();
    for _ in 0..n {
        let entity = EntityId(r.read_u32::<LittleEndian>()?);
        let pred = EntityId(r.read_u32::<LittleEndian>()?);
        let m = r.read_u32::<LittleEndian>()?;
        let mut values = Vec::with_capacity(m as usize);
        for _ in 0..m {
            values.push(read_term(r)?);
        }
        props.insert_raw((entity, pred), values);
    }
    Ok(props)
}

fn write_term(buf: &mut Vec<u8>, term: &Term) -> io::Result<()> {
    match term {
        Term::Iri(id) => {
            buf.write_u8(0)?;
            buf.write_u32::<LittleEndian>(id.0)?;
        }
        Term::Literal {
            lexical,
            lang,
            datatype,
        } => {
            buf.write_u8(1)?;
            write_string(buf, lexical)?;
            match lang {
                Some(tag) => {
                    buf.write_u8(1)?;
                    write_string(buf, tag)?;
                }
                None => buf.write_u8(0)?,
            }
            match datatype {
                Some(dt) => {
                    buf.write_u8(1)?;
                    buf.write_u32::<LittleEndian>(dt.0)?;
                }
                None => buf.write_u8(0)?,
            }
        }
    }
    Ok(())
}

fn read_term(r: &mut impl Read) -> io::Result<Term> {
    match r.read_u8()? {
        0 => Ok(Term::Iri(EntityId(r.read_u32::<LittleEndian>()?))),
        1 => {
            let lexical = read_string(r)?;
            let lang = if r.read_u8()? == 1 {
                Some(read_string(r)?)
            } else {
                None
            };
            let datatype = if r.read_u8()? == 1 {
                Some(EntityId(r.read_u32::<LittleEndian>()?))
            } else {
                None
            };
            Ok(Term::Literal {
                lexical,
                lang,
                datatype,
            })
        }
        other => Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("unknown term tag {other}"),
        )),
    }
}

fn write_string<W: Write>(w: &mut W, s: &str) -> io::Result<()> {
    w.write_u32::<LittleEndian>(s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_string(r: &mut impl Read) -> io::Result<String> {
    let len = r.read_u32::<LittleEndian>()? as usize;
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    String::from_utf8(bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

fn write_u32_slice(buf: &mut Vec<u8>, xs: &[u32]) -> io::Result<()> {
    buf.write_u64::<LittleEndian>(xs.len() as u64)?;
    for &x in xs {
        buf.write_u32::<LittleEndian>(x)?;
    }
    Ok(())
}

fn read_u32_vec(r: &mut impl Read) -> io::Result<Vec<u32>> {
    let n = r.read_u64::<LittleEndian>()?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(r.read_u32::<LittleEndian>()?);
    }
    Ok(out)
}

fn write_u64_slice(buf: &mut Vec<u8>, xs: &[u64]) -> io::Result<()> {
    buf.write_u64::<LittleEndian>(xs.len() as u64)?;
    for &x in xs {
        buf.write_u64::<LittleEndian>(x)?;
    }
    Ok(())
}

fn read_u64_vec(r: &mut impl Read) -> io::Result<Vec<u64>> {
    let n = r.read_u64::<LittleEndian>()?;
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(r.read_u64::<LittleEndian>()?);
    }
    Ok(out)
}
