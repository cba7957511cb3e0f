/** Where the service lives and who is annotating, from the page URL. */

/** Service origin from ?api=, else the serve default port on this host. */
export function baseUrlFrom(location: Location): string {
  const param = new URLSearchParams(location.search).get("api");
  if (param) return param;
  return `${location.protocol}//${location.hostname}:8570`;
}

/** Annotator label from ?annotator=, for the decision log. */
export function annotatorFrom(location: Location): string {
  return new URLSearchParams(location.search).get("annotator") ?? "anonymous";
}
