import { ApiClient } from "./api.js";
import { diffSize, wordDiff } from "./diff.js";
import { PlanView } from "./planview.js";
import { SessionState, splitSentences } from "./session.js";
import { ApiError, GenerateResponse, VocabResponse } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

function texturePng(b64: string): string {
  return `data:image/png;base64,${b64}`;
}

export class App {
  private readonly session = new SessionState();
  private vocab: VocabResponse | null = null;
  private planView: PlanView;

  constructor(private readonly api: ApiClient) {
    this.planView = new PlanView(el("plan-container"), {
      onSelect: (roomId) => this.selectRoom(roomId),
    });
  }

  async start(): Promise<void> {
    el<HTMLButtonElement>("btn-parse").addEventListener("click", () => this.parse());
    el<HTMLButtonElement>("btn-generate").addEventListener("click", () =>
      this.generate(),
    );
    el<HTMLButtonElement>("btn-regenerate").addEventListener("click", () =>
      this.generate(Math.floor(Math.random() * 1_000_000)),
    );
    el<HTMLButtonElement>("btn-compare").addEventListener("click", () =>
      this.compare(),
    );
    el<HTMLTextAreaElement>("description").addEventListener("input", () => {
      this.session.setText(el<HTMLTextAreaElement>("description").value);
      this.renderParse();
    });
    try {
      this.vocab = await this.api.vocab();
      await this.api.health();
      this.banner(null);
    } catch (err) {
      this.banner(this.describeError(err));
    }
  }

  private describeError(err: unknown): string {
    if (err instanceof ApiError) return `${err.body.code}: ${err.body.message}`;
    return `network error: ${String(err)}`;
  }

  private banner(message: string | null): void {
    const node = el("banner");
    node.textContent = message ?? "";
    node.style.display = message === null ? "none" : "block";
  }

  async parse(): Promise<void> {
    const text = el<HTMLTextAreaElement>("description").value;
    this.session.setText(text);
    if (text.trim().length === 0) {
      this.renderParse();
      return;
    }
    try {
      this.session.recordParse(await this.api.parse(text));
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        this.session.recordParseError(err.body);
      } else {
        this.banner(this.describeError(err));
        return;
      }
    }
    this.renderParse();
  }

  /** Room chips on success; the offending sentence underlined on error. */
  private renderParse(): void {
    const roomList = el("room-list");
    const errorBox = el("parse-error");
    roomList.innerHTML = "";
    errorBox.innerHTML = "";
    el<HTMLButtonElement>("btn-generate").disabled = !this.session.canGenerate;

    if (this.session.parseResult !== null && this.vocab !== null) {
      for (const room of this.session.parseResult.rooms) {
        const chip = document.createElement("span");
        chip.className = "chip";
        chip.dataset.roomId = room.id;
        chip.textContent =
          `${room.id} · ${this.vocab.room_types[room.room_type]} · ` +
          `${room.size_sqm} m² · ${this.vocab.positions[room.position]}`;
        roomList.appendChild(chip);
      }
    }

    const error = this.session.parseError;
    if (error !== null) {
      const sentences = splitSentences(this.session.text);
      const index = error.detail?.sentence_index;
      const parts = sentences.map((s, i) => {
        const span = document.createElement("span");
        span.textContent = s + ". ";
        if (i === index) {
          span.className = "error-sentence";
          span.title = error.message;
        }
        return span;
      });
      const label = document.createElement("div");
      label.className = "error-message";
      label.textContent =
        index !== undefined
          ? `sentence ${index + 1}: ${error.message}`
          : error.message;
      errorBox.appendChild(label);
      for (const p of parts) errorBox.appendChild(p);
    }
  }

  async generate(seed?: number): Promise<void> {
    if (!this.session.canGenerate) return;
    try {
      const result = await this.api.generate(this.session.text, seed);
      const entry = this.session.recordGeneration(
        this.session.text,
        result.seed,
        result,
      );
      this.renderResult(result);
      this.appendHistoryRow(entry.index, entry.seed, entry.hash);
      this.banner(null);
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        this.banner(
          `${err.body.code}: ${err.body.message} ` +
            "(hint: every house needs a living room and non-degenerate sizes)",
        );
      } else if (!(err instanceof DOMException && err.name === "AbortError")) {
        this.banner(this.describeError(err));
      }
    }
  }

  private renderResult(result: GenerateResponse): void {
    this.planView.render(result.plan_svg, result.plan);
    this.planView.setSelected(this.session.selectedRoom);

    const swatches = el("swatches");
    swatches.innerHTML = "";
    for (const room of result.plan.rooms) {
      const pair = result.textures[room.id];
      for (const kind of ["floor", "wall"] as const) {
        const img = document.createElement("img");
        img.className = "swatch";
        img.dataset.roomId = room.id;
        img.dataset.kind = kind;
        img.src = texturePng(pair[kind]);
        img.title = `${room.id} ${kind}`;
        swatches.appendChild(img);
      }
    }

    const download = el<HTMLAnchorElement>("obj-download");
    download.href = URL.createObjectURL(
      new Blob([result.obj], { type: "model/obj" }),
    );
    download.download = "house.obj";
    download.style.display = "inline";
  }

  private selectRoom(roomId: string | null): void {
    this.session.selectRoom(roomId);
    this.planView.setSelected(roomId);
    // scroll the room's description sentences into view
    if (roomId !== null) {
      const chip = document.querySelector(`[data-room-id="${roomId}"]`);
      chip?.scrollIntoView({ block: "nearest" });
    }
  }

  private appendHistoryRow(index: number, seed: number, hash: string): void {
    const row = document.createElement("li");
    row.textContent = `#${index} seed ${seed} hash ${hash}`;
    el("history-list").appendChild(row);
    const [selI, selJ] = this.compareSelects();
    for (const sel of [selI, selJ]) {
      const opt = document.createElement("option");
      opt.value = String(index);
      opt.textContent = `#${index}`;
      sel.appendChild(opt);
    }
    el<HTMLButtonElement>("btn-compare").disabled = this.session.history.length < 2;
  }

  private compareSelects(): [HTMLSelectElement, HTMLSelectElement] {
    return [el<HTMLSelectElement>("compare-i"), el<HTMLSelectElement>("compare-j")];
  }

  compare(): void {
    const [selI, selJ] = this.compareSelects();
    const i = Number(selI.value);
    const j = Number(selJ.value);
    if (!this.session.canCompare(i, j)) return;
    const a = this.session.history[i];
    const b = this.session.history[j];

    el("compare-left").innerHTML = a.result.plan_svg;
    el("compare-right").innerHTML = b.result.plan_svg;

    const tokens = wordDiff(a.text, b.text);
    const diffBox = el("compare-diff");
    diffBox.innerHTML = "";
    for (const token of tokens) {
      const span = document.createElement("span");
      span.textContent = token.word + " ";
      if (token.op !== "equal") span.className = `diff-${token.op}`;
      diffBox.appendChild(span);
    }
    el("compare-summary").textContent =
      diffSize(tokens) === 0
        ? "texts are identical"
        : `${diffSize(tokens)} word(s) differ`;
  }
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  const base = (window as { TEXTHOUSE_API?: string }).TEXTHOUSE_API ?? "";
  new App(new ApiClient(base)).start();
}
