use quick_xml::events::Event;
use quick_xml::Reader;

use super::Snippet;

#[derive(Debug, thiserror::Error)]
pub enum XmlError {
    #[error("malformed snippet XML at line {line}, column {column}: {message}")]
    Malformed {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("snippet element #{index}: {message}")]
    Schema { index: usize, message: String },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Field {
    Id,
    Url,
    Body,
    Title,
}

impl Field {
    fn from_name(name: &[u8]) -> Option<Self> {
        match name {
            b"id" => Some(Field::Id),
            b"url" | b"link" => Some(Field::Url),
            b"body" => Some(Field::Body),
            b"title" => Some(Field::Title),
            _ => None,
        }
    }
}

#[derive(Default)]
struct Partial {
    id: Option<String>,
    url: String,
    body: String,
    title: String,
}

impl Partial {
    fn slot(&mut self, field: Field) -> &mut String {
        match field {
            Field::Id => self.id.get_or_insert_with(String::new),
            Field::Url => &mut self.url,
            Field::Body => &mut self.body,
            Field::Title => &mut self.title,
        }
    }

    fn finish(self, index: usize) -> Result<Snippet, XmlError> {
        let raw = self.id.ok_or_else(|| XmlError::Schema {
            index,
            message: "missing <id>".into(),
        })?;
        let id = raw.trim().parse::<u32>().map_err(|_| XmlError::Schema {
            index,
            message: format!("<id> is not a non-negative integer: {raw:?}"),
        })?;
        Ok(Snippet {
            id,
            url: self.url.trim().to_string(),
            title: self.title,
            body: self.body,
        })
    }
}

fn line_column(bytes: &[u8], offset: usize) -> (usize, usize) {
    let prefix = &bytes[..offset.min(bytes.len())];
    let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
    let line_start = prefix
        .iter()
        .rposition(|&b| b == b'\n')
        .map_or(0, |p| p + 1);
    let column = String::from_utf8_lossy(&prefix[line_start..])
        .chars()
        .count()
        + 1;
    (line, column)
}

/// Parses the `<snippet><id/><url/><body/><title/></snippet>` layout.
///
/// Snippets may sit under any wrapping root element or directly at top level.
/// Unknown child elements are ignored.
pub fn parse_snippet_xml(bytes: &[u8]) -> Result<Vec<Snippet>, XmlError> {
    let mut reader = Reader::from_reader(bytes);
    let mut buf = Vec::new();
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current: Option<Partial> = None;
    let mut field: Option<Field> = None;

    let malformed = |reader: &Reader<&[u8]>, message: String| {
        let (line, column) = line_column(bytes, reader.error_position() as usize);
        XmlError::Malformed {
            line,
            column,
            message,
        }
    };

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| malformed(&reader, e.to_string()))?;
        match event {
            Event::Start(e) => {
                depth += 1;
                let name = e.local_name();
                if name.as_ref() == b"snippet" {
                    if current.is_some() {
                        return Err(malformed(&reader, "nested <snippet>".into()));
                    }
                    current = Some(Partial::default());
                } else if let Some(partial) = current.as_mut() {
                    field = Field::from_name(name.as_ref());
                    if let Some(f) = field {
                        partial.slot(f);
                    }
                }
            }
            Event::Empty(e) => {
                let name = e.local_name();
                if name.as_ref() == b"snippet" {
                    return Err(XmlError::Schema {
                        index: out.len(),
                        message: "missing <id>".into(),
                    });
                }
                if let (Some(partial), Some(f)) =
                    (current.as_mut(), Field::from_name(name.as_ref()))
                {
                    partial.slot(f);
                }
            }
            Event::End(e) => {
                depth = depth.saturating_sub(1);
                if e.local_name().as_ref() == b"snippet" {
                    if let Some(partial) = current.take() {
                        out.push(partial.finish(out.len())?);
                    }
                }
                field = None;
            }
            Event::Text(t) => {
                if let (Some(partial), Some(f)) = (current.as_mut(), field) {
                    let text = t
                        .unescape()
                        .map_err(|e| malformed(&reader, e.to_string()))?;
                    partial.slot(f).push_str(&text);
                }
            }
            Event::CData(t) => {
                if let (Some(partial), Some(f)) = (current.as_mut(), field) {
                    let text =
                        std::str::from_utf8(&t).map_err(|e| malformed(&reader, e.to_string()))?;
                    partial.slot(f).push_str(text);
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if depth != 0 || current.is_some() {
        let (line, column) = line_column(bytes, bytes.len());
        return Err(XmlError::Malformed {
            line,
            column,
            message: "unexpected end of document (unclosed element)".into(),
        });
    }
    Ok(out)
}

/// Serializes snippets in the same layout [`parse_snippet_xml`] reads.
pub fn write_snippet_xml(snippets: &[Snippet]) -> String {
    use quick_xml::escape::escape;

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<snippets>\n");
    for s in snippets {
        out.push_str("<snippet>\n");
        out.push_str(&format!("<id>{}</id>\n", s.id));
        out.push_str(&format!("<url>{}</url>\n", escape(s.url.as_str())));
        out.push_str(&format!("<body>{}</body>\n", escape(s.body.as_str())));
        out.push_str(&format!("<title>{}</title>\n", escape(s.title.as_str())));
        out.push_str("</snippet>\n");
    }
    out.push_str("</snippets>\n");
    out
}
