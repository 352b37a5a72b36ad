//! Minimal standard MIDI file writer: format 0, one track.

/// Ticks per quarter note.
pub const PPQ: u16 = 480;
/// Channel 10 in zero-based form.
pub const PERCUSSION_CHANNEL: u8 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Message {
    NoteOff { key: u8 },
    NoteOn { key: u8, velocity: u8 },
}

fn write_vlq(out: &mut Vec<u8>, mut v: u32) {
    let mut buf = [0u8; 4];
    let mut n = 0;
    loop {
        buf[n] = (v & 0x7f) as u8;
        n += 1;
        v >>= 7;
        if v == 0 {
            break;
        }
    }
    for i in (0..n).rev() {
        out.push(if i > 0 { buf[i] | 0x80 } else { buf[i] });
    }
}

/// Builds a format-0 file from `(tick, message)` pairs. Messages are
/// written in tick order; at equal ticks note-offs precede note-ons.
pub(crate) fn write_smf(micros_per_quarter: u32, mut events: Vec<(u32, Message)>) -> Vec<u8> {
    events.sort();
    let mut track = Vec::new();
    // tempo
    track.extend_from_slice(&[0x00, 0xff, 0x51, 0x03]);
    track.extend_from_slice(&micros_per_quarter.to_be_bytes()[1..]);
    // 4/4
    track.extend_from_slice(&[0x00, 0xff, 0x58, 0x04, 0x04, 0x02, 0x18, 0x08]);
    let mut last = 0u32;
    for (tick, msg) in events {
        write_vlq(&mut track, tick - last);
        last = tick;
        match msg {
            Message::NoteOn { key, velocity } => {
                track.extend_from_slice(&[0x90 | PERCUSSION_CHANNEL, key, velocity])
            }
            Message::NoteOff { key } => {
                track.extend_from_slice(&[0x80 | PERCUSSION_CHANNEL, key, 0x40])
            }
        }
    }
    track.extend_from_slice(&[0x00, 0xff, 0x2f, 0x00]);

    let mut out = Vec::with_capacity(22 + track.len());
    out.extend_from_slice(b"MThd");
    out.extend_from_slice(&6u32.to_be_bytes());
    out.extend_from_slice(&0u16.to_be_bytes());
    out.extend_from_slice(&1u16.to_be_bytes());
    out.extend_from_slice(&PPQ.to_be_bytes());
    out.extend_from_slice(b"MTrk");
    out.extend_from_slice(&(track.len() as u32).to_be_bytes());
    out.extend_from_slice(&track);
    out
}
