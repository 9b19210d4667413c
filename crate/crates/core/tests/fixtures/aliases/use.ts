import { w, Renamed as R } from "./mid";

export function use() {
  const r = new R();
  r.go();
  return w;
}
