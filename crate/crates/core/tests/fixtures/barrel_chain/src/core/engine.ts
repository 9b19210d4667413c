export class Engine {
  start(): void {}
}

export function boot(): Engine {
  return new Engine();
}
