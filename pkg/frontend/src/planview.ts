import { Plan } from "./types.js";

export interface PlanViewHandlers {
  onSelect(roomId: string | null): void;
}

/** Renders the server's plan SVG and maps every room to its SVG element
 * for hit-testing; the client never draws geometry itself. */
export class PlanView {
  private roomElements = new Map<string, SVGElement>();
  private selected: string | null = null;

  constructor(
    private readonly container: HTMLElement,
    private readonly handlers: PlanViewHandlers,
  ) {}

  /** Replace the view with a new plan SVG from the API. Throws if any
   * room of the plan has no matching SVG element. */
  render(planSvg: string, plan: Plan): void {
    this.container.innerHTML = planSvg;
    this.roomElements.clear();
    this.selected = null;

    for (const room of plan.rooms) {
      const el = this.container.querySelector<SVGElement>(
        `[id="room-${room.id}"]`,
      );
      if (el === null) {
        throw new Error(`plan SVG has no element for room ${room.id}`);
      }
      this.roomElements.set(room.id, el);
      el.style.cursor = "pointer";
      el.addEventListener("click", () => {
        this.handlers.onSelect(this.selected === room.id ? null : room.id);
      });
    }
  }

  get roomIds(): string[] {
    return [...this.roomElements.keys()];
  }

  setSelected(roomId: string | null): void {
    for (const [id, el] of this.roomElements) {
      if (id === roomId) {
        el.setAttribute("stroke", "#d6336c");
        el.setAttribute("stroke-width", "4");
      } else {
        el.removeAttribute("stroke");
        el.removeAttribute("stroke-width");
      }
    }
    this.selected = roomId;
  }
}
